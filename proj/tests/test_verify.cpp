#include "doctest.h"
#include "sp2lab/verify.hpp"

using namespace sp2lab;

namespace {
VerifyOptions small() {
  VerifyOptions o;
  o.scale = 0.2;
  o.run_scans = false;
  return o;
}

void require_pass(const SuiteResult& S) {
  for (const auto& c : S.checks) {
    CAPTURE(c.id);
    CAPTURE(c.residual);
    CAPTURE(c.detail);
    CAPTURE(c.counterexample);
    CHECK(c.pass);
  }
  CHECK(S.pass());
}
}  // namespace

TEST_CASE("suite names") {
  CHECK(suite_names().size() == 7);
  CHECK_THROWS_AS(run_suite("nope", small()), std::invalid_argument);
  VerifyOptions bad = small();
  bad.params.nu1 = 0.9;
  CHECK_THROWS_AS(run_suite("topo8", bad), std::invalid_argument);
}

TEST_CASE("topology suite") { require_pass(run_suite("topo8", small())); }
TEST_CASE("cheeger suite") { require_pass(run_suite("cheeger", small())); }
TEST_CASE("hopf suite") { require_pass(run_suite("hopf4", small())); }
TEST_CASE("basis suite") { require_pass(run_suite("basis6", small())); }
TEST_CASE("zero plane suite") { require_pass(run_suite("zeros5", small())); }
TEST_CASE("locus suite without scans") { require_pass(run_suite("locus7", small())); }

TEST_CASE("cheeger suite with infinite scales") {
  VerifyOptions o = small();
  o.params.l1u = Scale::inf();
  o.params.l1d = Scale::inf();
  require_pass(run_suite("cheeger", o));
}

TEST_CASE("locus suite for unequal fibre scales") {
  VerifyOptions o = small();
  o.params.nu1 = 0.4;
  o.params.nu2 = 0.6;
  require_pass(run_suite("locus7", o));
}

TEST_CASE("concordance and soundness pieces") {
  const ConcordanceReport C = closed_form_concordance(0.5, 0.5, 2, 3, 11);
  CHECK(C.tuples == 2);
  CHECK(C.samples > 0);
  CHECK(C.max_residual <= 1e-4);
  const SoundnessReport R = sp2_classification_sweep(0.5, 0.5, 2, 14, 3);
  CHECK(R.planes == 28);
  CHECK(R.mismatches == 0);
  CHECK(R.unclassified == 0);
  CHECK(R.zero_predicted > 0);
  CHECK(R.positive_predicted > 0);
  const HopfReport H = hopf_concordance(10, 5);
  CHECK(H.max_error <= 1e-8);
  const BasisReport B = horizontal_basis_report(MetricParams{}, 8);
  CHECK(B.ok);
}
