#include "fixtures.hpp"

#include <stdexcept>

#include "pcor/samplers.hpp"

namespace acceptance {

using namespace pcor;

namespace {

std::map<DetectorKind, DetectorSpec> default_detectors() {
  std::map<DetectorKind, DetectorSpec> out;
  for (DetectorKind kind : {DetectorKind::Grubbs, DetectorKind::Lof, DetectorKind::Histogram}) {
    DetectorSpec spec;
    spec.kind = kind;
    out[kind] = spec;
  }
  return out;
}

}  // namespace

const T9& t9() {
  static const T9 instance = [] {
    FixtureSpec spec;
    spec.domain_sizes = {3, 3, 3};
    spec.records = 1500;
    spec.seed = 1;
    spec.planted_outliers = 1;
    T9 out{generate_fixture(spec), 0, {}, {}, {}};
    out.target = out.fixture.planted_ids.front();
    out.detectors = default_detectors();

    const Record& target = *out.fixture.dataset.find_record(out.target);
    for (const auto& [kind, det] : out.detectors) {
      const VerifyFn verify = make_verifier(det);
      out.coe[kind] = enumerate_coe(out.fixture.dataset, target, verify);
      if (out.coe[kind].contexts.empty())
        throw std::logic_error("t9 fixture: empty COE for a detector");
      Rng rng(Rng::derive_seed(spec.seed, 0x57A27, static_cast<std::uint64_t>(kind)));
      out.start[kind] = find_starting_context(out.fixture.dataset, target, verify, rng);
    }
    return out;
  }();
  return instance;
}

std::vector<std::int64_t> T12::targets_with_coe(DetectorKind kind, std::size_t count) const {
  std::vector<std::int64_t> out;
  const ReferenceFile& ref = refs.at(kind);
  for (const Record& r : fixture.dataset.records()) {
    if (out.size() == count) break;
    if (!ref.matching_rows(r.id).empty()) out.push_back(r.id);
  }
  return out;
}

const T12& t12() {
  static const T12 instance = [] {
    FixtureSpec spec;
    spec.domain_sizes = {4, 4, 4};
    spec.records = 1200;
    spec.seed = 5;
    spec.planted_outliers = 2;
    T12 out{generate_fixture(spec), {}, {}};
    out.detectors = default_detectors();
    for (const auto& [kind, det] : out.detectors)
      out.refs.emplace(kind, ReferenceFile::build(out.fixture.dataset, det, UtilitySpec{}));
    return out;
  }();
  return instance;
}

const T14& t14() {
  static const T14 instance = [] {
    FixtureSpec spec;
    spec.domain_sizes = {5, 5, 4};
    spec.records = 6000;
    spec.seed = 1;
    spec.planted_outliers = 1;
    T14 out{generate_fixture(spec), 0, {}, {}, {}};
    out.target = out.fixture.planted_ids.front();

    const Record& target = *out.fixture.dataset.find_record(out.target);
    const Schema& schema = out.fixture.dataset.schema();
    out.home_start = Context(schema.total_bits());
    for (std::uint32_t a = 0; a < schema.attribute_count(); ++a)
      out.home_start.set(schema.bit_index(a, target.values[a]), true);

    DetectorSpec lof;
    lof.kind = DetectorKind::Lof;
    out.lof_ref = std::make_unique<ReferenceFile>(
        ReferenceFile::build(out.fixture.dataset, lof, UtilitySpec{}));
    DetectorSpec grubbs;
    out.grubbs_ref = std::make_unique<ReferenceFile>(
        ReferenceFile::build(out.fixture.dataset, grubbs, UtilitySpec{}));

    for (const DetectorSpec& det : {lof, grubbs}) {
      const VerifyFn verify = make_verifier(det);
      if (!verify(out.fixture.dataset.filter(out.home_start), target).is_outlier)
        throw std::logic_error("t14 fixture: home cell is not a matching start");
    }
    return out;
  }();
  return instance;
}

}  // namespace acceptance
