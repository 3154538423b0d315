#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "mclab/chain.hpp"
#include "mclab/gallery.hpp"
#include "test_util.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace mclab;

namespace {

MatrixXd two_state_kernel(double p) {
  MatrixXd q(2, 2);
  q << 1 - p, p, p, 1 - p;
  return q;
}

}  // namespace

TEST_CASE("symmetric two-state chain: uniform stationary law, f unchanged") {
  VectorXd f(2);
  f << 1, -1;
  const ChainModel chain = build_chain(two_state_kernel(0.3), f);
  CHECK(chain.stationary(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(chain.stationary(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(chain.observable(0) - 1.0) < 1e-12);
  CHECK(std::abs(chain.observable(1) + 1.0) < 1e-12);
  CHECK(std::abs(chain.recenter_shift) < 1e-12);
}

TEST_CASE("iid rows: supplied law accepted, centered f untouched") {
  MatrixXd q(2, 2);
  q << 0.2, 0.8, 0.2, 0.8;
  VectorXd f(2), pi(2);
  f << 4, -1;
  pi << 0.2, 0.8;
  const ChainModel chain = build_chain(q, f, pi);
  CHECK(chain.stationary(0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(chain.observable(0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(chain.observable(1) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("cycle walk with hold: doubly stochastic kernel has uniform law") {
  MatrixXd q(3, 3);
  q << 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5;
  VectorXd f(3);
  f << 1, 0, -1;
  const ChainModel chain = build_chain(q, f);
  for (int x = 0; x < 3; ++x) {
    CHECK(chain.stationary(x) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
}

TEST_CASE("observable with nonzero mean is re-centered and the shift recorded") {
  VectorXd f(2);
  f << 1, 0;
  const ChainModel chain = build_chain(two_state_kernel(0.5), f);
  CHECK(chain.recenter_shift == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(chain.stationary.dot(chain.observable)) < 1e-14);
}

TEST_CASE("kernel validation failures") {
  VectorXd f(2);
  f << 1, -1;
  SUBCASE("row does not sum to one") {
    MatrixXd q(2, 2);
    q << 0.6, 0.3, 0.3, 0.7;
    CHECK_THROWS_WITH_AS(build_chain(q, f), doctest::Contains("row 0"), NonStochasticKernel);
  }
  SUBCASE("negative entry") {
    MatrixXd q(2, 2);
    q << 1.2, -0.2, 0.3, 0.7;
    CHECK_THROWS_AS(build_chain(q, f), NonStochasticKernel);
  }
  SUBCASE("non-finite entry") {
    MatrixXd q(2, 2);
    q << 0.5, 0.5, 0.5, std::nan("");
    CHECK_THROWS_AS(build_chain(q, f), NonStochasticKernel);
  }
}

TEST_CASE("reducible kernels") {
  VectorXd f(2);
  f << 1, -1;
  SUBCASE("two closed classes need a supplied law") {
    CHECK_THROWS_AS(build_chain(MatrixXd::Identity(2, 2), f), NoUniqueStationaryLaw);
  }
  SUBCASE("transient state means zero mass") {
    MatrixXd q(2, 2);
    q << 1.0, 0.0, 0.5, 0.5;
    CHECK_THROWS_AS(build_chain(q, f), ZeroMassState);
  }
  SUBCASE("supplied full-support law on a reducible kernel is accepted") {
    VectorXd pi(2);
    pi << 0.3, 0.7;
    const ChainModel chain = build_chain(MatrixXd::Identity(2, 2), f, pi);
    CHECK_FALSE(classify(chain).irreducible);
  }
  SUBCASE("supplied law with a zero entry is rejected") {
    VectorXd pi(2);
    pi << 1.0, 0.0;
    CHECK_THROWS_AS(build_chain(MatrixXd::Identity(2, 2), f, pi), ZeroMassState);
  }
  SUBCASE("supplied law that is not fixed is rejected") {
    VectorXd pi(2);
    pi << 0.3, 0.7;
    CHECK_THROWS_AS(build_chain(two_state_kernel(0.3), f, pi), InvalidStationaryLaw);
  }
}

TEST_CASE("adjoint examples") {
  SUBCASE("symmetric kernel is self-adjoint") {
    VectorXd f(2);
    f << 1, -1;
    const ChainModel chain = build_chain(two_state_kernel(0.3), f);
    CHECK((adjoint(chain) - chain.kernel).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("deterministic rotation reverses") {
    MatrixXd q = MatrixXd::Zero(3, 3);
    q(0, 1) = q(1, 2) = q(2, 0) = 1.0;
    VectorXd f(3);
    f << 1, 0, -1;
    const ChainModel chain = build_chain(q, f);
    const MatrixXd qs = adjoint(chain);
    CHECK(qs(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(qs(2, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(qs(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("duality <Qg,h> = <g,Q*h> for random pairs") {
  const ChainModel chain = testutil::random_chain(11, 3);
  const MatrixXd qs = adjoint(chain);
  SplitMix64 rng{99};
  for (int rep = 0; rep < 200; ++rep) {
    const VectorXd g = testutil::random_vector(rng, 3);
    const VectorXd h = testutil::random_vector(rng, 3);
    const double lhs = pi_inner(chain, chain.kernel * g, h);
    const double rhs = pi_inner(chain, g, qs * h);
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("adjoint is an involution") {
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const ChainModel chain = testutil::random_chain(seed, 4);
    const ChainModel rev = adjoint_chain(chain);
    CHECK((adjoint(rev) - chain.kernel).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Q and Q* are L2(pi) contractions") {
  const ChainModel chain = testutil::random_chain(5, 5);
  const MatrixXd qs = adjoint(chain);
  SplitMix64 rng{7};
  for (int rep = 0; rep < 100; ++rep) {
    const VectorXd g = testutil::random_vector(rng, 5);
    CHECK(pi_norm(chain, chain.kernel * g) <= pi_norm(chain, g) * (1 + 1e-12));
    CHECK(pi_norm(chain, qs * g) <= pi_norm(chain, g) * (1 + 1e-12));
  }
}

TEST_CASE("classification") {
  SUBCASE("deterministic 2-cycle: ergodic but not totally ergodic") {
    const ChainClassification c = classify(two_cycle());
    CHECK(c.irreducible);
    CHECK(c.period == 2);
    CHECK(c.ergodic);
    CHECK_FALSE(c.aperiodic);
    CHECK_FALSE(c.totally_ergodic);
    CHECK(c.reversible);
    CHECK(c.normal);
  }
  SUBCASE("uniform iid chain on two states is reversible and normal") {
    MatrixXd q(2, 2);
    q << 0.5, 0.5, 0.5, 0.5;
    VectorXd f(2);
    f << 1, -1;
    const ChainClassification c = classify(build_chain(q, f));
    CHECK(c.reversible);
    CHECK(c.normal);
    CHECK(c.totally_ergodic);
  }
  SUBCASE("circulant 5-state walk: normal, not reversible") {
    const ChainClassification c = classify(gallery_cycle_walk(5, 0.8));
    CHECK(c.normal);
    CHECK(c.normality_defect < 1e-12);
    CHECK_FALSE(c.reversible);
    CHECK(c.totally_ergodic);
  }
  SUBCASE("dense random chain is generically non-normal") {
    CHECK_FALSE(classify(gallery_random_dense(6, 1)).normal);
  }
  SUBCASE("birth-death is reversible") { CHECK(classify(gallery_birth_death(4)).reversible); }
}

TEST_CASE("classification invariants across a chain zoo") {
  std::vector<ChainModel> zoo = {two_cycle(), gallery_iid(3), gallery_cycle_walk(5, 0.8),
                                 gallery_birth_death(4), gallery_random_dense(6, 1)};
  for (std::uint64_t seed = 0; seed < 20; ++seed) zoo.push_back(testutil::random_chain(seed, 4));
  for (const ChainModel& chain : zoo) {
    const ChainClassification c = classify(chain);
    if (c.reversible) CHECK(c.normal);
    if (c.totally_ergodic) CHECK(c.ergodic);
    CHECK(c.normal == (c.normality_defect <= chain.tol.normal));
    CHECK(c.ergodic == c.irreducible);
  }
}

TEST_CASE("classification is invariant under state relabelling") {
  const ChainModel chain = testutil::random_chain(21, 5);
  const ChainClassification base = classify(chain);
  const int perm[5] = {3, 0, 4, 1, 2};
  MatrixXd pk(5, 5);
  VectorXd pf(5);
  for (int x = 0; x < 5; ++x) {
    pf(perm[x]) = chain.observable(x);
    for (int y = 0; y < 5; ++y) pk(perm[x], perm[y]) = chain.kernel(x, y);
  }
  const ChainClassification permuted = classify(build_chain(pk, pf));
  CHECK(permuted.irreducible == base.irreducible);
  CHECK(permuted.aperiodic == base.aperiodic);
  CHECK(permuted.totally_ergodic == base.totally_ergodic);
  CHECK(permuted.reversible == base.reversible);
  CHECK(permuted.normal == base.normal);
  CHECK(permuted.normality_defect == doctest::Approx(base.normality_defect).epsilon(1e-10));
}

TEST_CASE("pi_inner arithmetic") {
  MatrixXd q(2, 2);
  q << 0.2, 0.8, 0.2, 0.8;
  VectorXd pi(2), f(2), ones(2);
  pi << 0.2, 0.8;
  f << 4, -1;
  ones << 1, 1;
  const ChainModel chain = build_chain(q, f, pi);
  CHECK(pi_inner(chain, f, f) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(std::abs(pi_inner(chain, chain.observable, ones)) < 1e-12);

  const ChainModel sym = build_chain(two_state_kernel(0.3), (VectorXd(2) << 1, -1).finished());
  CHECK(pi_inner(sym, sym.observable, sym.observable) == doctest::Approx(1.0).epsilon(1e-12));

  VectorXd bad(3);
  CHECK_THROWS_AS(pi_inner(chain, f, bad), LengthMismatch);
}

TEST_CASE("chain-spec file round trip and parse errors") {
  SUBCASE("round trip") {
    const ChainModel chain = gallery_birth_death(4);
    const ChainModel back = parse_chain_spec(chain_spec_text(chain));
    CHECK((back.kernel - chain.kernel).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((back.stationary - chain.stationary).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.observable - chain.observable).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(back.states == chain.states);
  }
  SUBCASE("ragged kernel row is rejected with the row named") {
    const char* text = R"({"kernel": [[0.5, 0.5], [1.0]], "observable": [1, -1]})";
    CHECK_THROWS_WITH_AS(parse_chain_spec(text), doctest::Contains("row 1"), SpecParseError);
  }
  SUBCASE("non-finite numbers are rejected") {
    const char* text = R"({"kernel": [[0.5, 0.5], [0.5, NaN]], "observable": [1, -1]})";
    CHECK_THROWS_AS(parse_chain_spec(text), SpecParseError);
  }
  SUBCASE("missing fields are rejected") {
    CHECK_THROWS_AS(parse_chain_spec(R"({"kernel": [[1.0]]})"), SpecParseError);
  }
  SUBCASE("non-numeric entries are rejected") {
    const char* text = R"({"kernel": [[0.5, 0.5], [0.5, "x"]], "observable": [1, -1]})";
    CHECK_THROWS_AS(parse_chain_spec(text), SpecParseError);
  }
  SUBCASE("stationary length mismatch is rejected") {
    const char* text =
        R"({"kernel": [[0.5, 0.5], [0.5, 0.5]], "observable": [1, -1], "stationary": [1.0]})";
    CHECK_THROWS_WITH_AS(parse_chain_spec(text), doctest::Contains("stationary"), SpecParseError);
  }
}

TEST_CASE("power-iteration fallback agrees with the direct solve") {
  const ChainModel chain = testutil::random_chain(31, 5);
  Tolerances tol;
  tol.stationary_direct_max = 1;  // force the iterative branch
  const VectorXd pi = stationary_law(chain.kernel, tol);
  CHECK((pi - chain.stationary).cwiseAbs().maxCoeff() < 1e-9);
}
