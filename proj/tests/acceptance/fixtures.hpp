#ifndef PCOR_ACCEPTANCE_FIXTURES_HPP
#define PCOR_ACCEPTANCE_FIXTURES_HPP

#include <map>
#include <memory>
#include <vector>

#include "pcor/detectors.hpp"
#include "pcor/fixture.hpp"
#include "pcor/oracle.hpp"

namespace acceptance {

/// t = 9 fixture: one planted hidden outlier, per-detector ground truth and
/// starting contexts. Used by the validity, budget and sampling-cost criteria.
struct T9 {
  pcor::Fixture fixture;
  std::int64_t target = 0;
  std::map<pcor::DetectorKind, pcor::DetectorSpec> detectors;
  std::map<pcor::DetectorKind, pcor::CoeSet> coe;
  std::map<pcor::DetectorKind, pcor::Context> start;
};

/// t = 12 fixture: two planted outliers plus per-detector reference files for
/// target selection. Used by the oracle-equality, f-Neighbor and audit
/// criteria.
struct T12 {
  pcor::Fixture fixture;
  std::map<pcor::DetectorKind, pcor::DetectorSpec> detectors;
  std::map<pcor::DetectorKind, pcor::ReferenceFile> refs;

  /// First `count` record ids with a non-empty COE under the detector.
  std::vector<std::int64_t> targets_with_coe(pcor::DetectorKind kind, std::size_t count) const;
};

/// t = 14 fixture: the utility-ordering experiment bed. One planted outlier,
/// its home-cell starting context, and reference files for LOF and Grubbs.
struct T14 {
  pcor::Fixture fixture;
  std::int64_t target = 0;
  pcor::Context home_start;
  std::unique_ptr<pcor::ReferenceFile> lof_ref;
  std::unique_ptr<pcor::ReferenceFile> grubbs_ref;
};

const T9& t9();
const T12& t12();
const T14& t14();

}  // namespace acceptance

#endif  // PCOR_ACCEPTANCE_FIXTURES_HPP
