#include <doctest.h>

#include <cmath>
#include <numbers>

#include "deepthermal/error.hpp"
#include "deepthermal/hilbert.hpp"

using namespace deepthermal;
using namespace deepthermal::hilbert;

namespace {

// Brute-force count of strings with no two adjacent up spins.
std::size_t count_blockaded(int n, bool periodic) {
  std::size_t c = 0;
  for (Bits s = 0; s < (Bits{1} << n); ++s) {
    bool ok = true;
    for (int j = 0; j + 1 < n; ++j)
      if (((s >> j) & 1) && ((s >> (j + 1)) & 1)) ok = false;
    if (periodic && (s & 1) && ((s >> (n - 1)) & 1)) ok = false;
    c += ok;
  }
  return c;
}

std::size_t fibonacci(int i) {
  std::size_t a = 1, b = 1;  // F_1, F_2
  for (int k = 3; k <= i; ++k) {
    const std::size_t c = a + b;
    a = b;
    b = c;
  }
  return i <= 2 ? 1 : b;
}

}  // namespace

TEST_CASE("space dimensions") {
  CHECK(build_space(3, SpaceKind::Full, Boundary::Open).dim() == 8);
  CHECK(build_space(6, SpaceKind::Blockaded, Boundary::Open).dim() == count_blockaded(6, false));
  CHECK(build_space(6, SpaceKind::Blockaded, Boundary::Open).dim() == 21);
  CHECK(build_space(6, SpaceKind::Blockaded, Boundary::Periodic).dim() == count_blockaded(6, true));
  CHECK(build_space(6, SpaceKind::Blockaded, Boundary::Periodic).dim() == 18);
  for (int n = 2; n <= 14; ++n) {
    const auto s = build_space(n, SpaceKind::Blockaded, Boundary::Open);
    CHECK(s.dim() == count_blockaded(n, false));
    CHECK(s.dim() == fibonacci(n + 2));
    if (n >= 4)
      CHECK(s.dim() == build_space(n - 1, SpaceKind::Blockaded, Boundary::Open).dim() +
                           build_space(n - 2, SpaceKind::Blockaded, Boundary::Open).dim());
  }
}

TEST_CASE("ordering, lookup and determinism") {
  const auto a = build_space(8, SpaceKind::Blockaded, Boundary::Periodic);
  const auto b = build_space(8, SpaceKind::Blockaded, Boundary::Periodic);
  CHECK(a.configs() == b.configs());
  CHECK(a.hash() == b.hash());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    CHECK(a.index_of(a.config(i)) == static_cast<std::int64_t>(i));
    if (i) CHECK(a.config(i) > a.config(i - 1));
  }
  CHECK(a.index_of(0b11) == -1);
  const auto full = build_space(5, SpaceKind::Full, Boundary::Open);
  CHECK(full.identity_indexed());
  CHECK(full.index_of(17) == 17);
}

TEST_CASE("build_space errors") {
  CHECK_THROWS_AS(build_space(1, SpaceKind::Full, Boundary::Open), ValidationError);
  CHECK_THROWS_AS(build_space(2, SpaceKind::Blockaded, Boundary::Periodic), ValidationError);
  CHECK_THROWS_AS(build_space(kMaxSites + 1, SpaceKind::Full, Boundary::Open), ValidationError);
}

TEST_CASE("config strings are site ordered") {
  CHECK(config_from_string("1000") == 1);
  CHECK(config_from_string("0001") == 8);
  CHECK(config_to_string(5, 4) == "1010");
  CHECK_THROWS_AS(config_from_string("10x"), ValidationError);
  CHECK(parity_of(0b00, 2) == 1);
  CHECK(parity_of(0b01, 2) == -1);
  CHECK(parity_of(0b111, 3) == 1);
}

TEST_CASE("parity filter") {
  const auto full2 = build_space(2, SpaceKind::Full, Boundary::Open);
  const auto p2 = filter_parity(full2, +1);
  CHECK(p2.configs() == std::vector<Bits>{0b00, 0b11});
  CHECK(filter_parity(build_space(3, SpaceKind::Full, Boundary::Open), -1).dim() == 4);
  const auto p12 = filter_parity(build_space(12, SpaceKind::Full, Boundary::Open), +1);
  CHECK(p12.dim() == 2048);
  for (Bits c : p12.configs()) CHECK(parity_of(c, 12) == 1);
  CHECK_THROWS_AS(filter_parity(build_space(4, SpaceKind::Blockaded, Boundary::Open), 1), ValidationError);
}

TEST_CASE("bipartition examples") {
  SUBCASE("full space, no postselection") {
    const auto bp = bipartition(build_space(4, SpaceKind::Full, Boundary::Open), 2, {});
    CHECK(bp.admissible_zb().size() == 4);
    CHECK(bp.n_b_eff() == doctest::Approx(2.0));
    CHECK(bp.admissible_zb().size() * bp.a_space().dim() == 16);
  }
  SUBCASE("parity sector with parity_B") {
    const auto sec = filter_parity(build_space(4, SpaceKind::Full, Boundary::Open), +1);
    const auto bp = bipartition(sec, 2, {Postselect::ParityB, +1});
    CHECK(bp.admissible_zb() == std::vector<Bits>{0b00, 0b11});
    CHECK(bp.a_space().configs() == std::vector<Bits>{0b00, 0b11});
    CHECK(bp.a_parity() == 1);
    const auto bm = bipartition(sec, 2, {Postselect::ParityB, -1});
    CHECK(bm.a_space().configs() == std::vector<Bits>{0b01, 0b10});
  }
  SUBCASE("blockaded space with boundary_down") {
    const auto space = build_space(8, SpaceKind::Blockaded, Boundary::Open);
    const auto bp = bipartition(space, 3, {Postselect::BoundaryDown, 1});
    CHECK(bp.a_space().dim() == 5);
    CHECK(bp.a_space().kind() == SpaceKind::Blockaded);
    // Brute force: blockaded strings on sites 4..8 with site 4 down.
    std::vector<Bits> expect;
    for (Bits z = 0; z < 32; ++z) {
      if (z & 1) continue;
      if (z & (z >> 1)) continue;
      expect.push_back(z);
    }
    CHECK(bp.admissible_zb() == expect);
    for (std::size_t b = 0; b < expect.size(); ++b)
      for (std::size_t a = 0; a < bp.a_space().dim(); ++a) CHECK(bp.row(b)[a] >= 0);
  }
}

TEST_CASE("bipartition invariants for small chains") {
  for (int n = 4; n <= 12; ++n) {
    const auto full = build_space(n, SpaceKind::Full, Boundary::Open);
    const auto blk = build_space(n, SpaceKind::Blockaded, Boundary::Open);
    for (int na = 1; na <= std::min(4, n - 2); ++na) {
      const auto bf = bipartition(full, na, {});
      CHECK(bf.admissible_zb().size() * bf.a_space().dim() == full.dim());
      const auto bb = bipartition(blk, na, {Postselect::BoundaryDown, 1});
      std::size_t hits = 0;
      for (std::size_t b = 0; b < bb.admissible_zb().size(); ++b)
        for (std::size_t a = 0; a < bb.a_space().dim(); ++a) {
          REQUIRE(bb.row(b)[a] >= 0);
          ++hits;
        }
      std::size_t expected = 0;
      for (Bits c : blk.configs()) expected += ((c >> na) & 1) == 0;
      CHECK(hits == expected);
    }
  }
}

TEST_CASE("bipartition errors") {
  const auto full = build_space(4, SpaceKind::Full, Boundary::Open);
  CHECK_THROWS_AS(bipartition(full, 0, {}), ValidationError);
  CHECK_THROWS_AS(bipartition(full, 3, {}), ValidationError);
  CHECK_THROWS_AS(bipartition(full, 2, {Postselect::ParityB, 1}), ValidationError);
  CHECK_THROWS_AS(bipartition(full, 2, {Postselect::BoundaryDown, 1}), ValidationError);
}

TEST_CASE("momentum sectors") {
  const auto s2 = build_space(2, SpaceKind::Full, Boundary::Periodic);
  const auto k0 = momentum_project(s2, 0);
  const auto k1 = momentum_project(s2, 1);
  CHECK(k0.basis.cols() == 3);
  CHECK(k1.basis.cols() == 1);
  CHECK(std::abs(std::abs(k1.basis(1, 0)) - 1 / std::numbers::sqrt2) < 1e-14);
  CHECK(std::abs(k1.basis(1, 0) + k1.basis(2, 0)) < 1e-14);

  for (int n : {4, 6}) {
    const auto space = build_space(n, SpaceKind::Full, Boundary::Periodic);
    Eigen::Index total = 0;
    CMatrix all(static_cast<Eigen::Index>(space.dim()), 0);
    for (int m = 0; m < n; ++m) {
      const auto sec = momentum_project(space, m);
      total += sec.basis.cols();
      // T v = e^{iK} v, with T moving site j to j + 1.
      for (Eigen::Index c = 0; c < sec.basis.cols(); ++c) {
        CVector tv = CVector::Zero(sec.basis.rows());
        for (Eigen::Index i = 0; i < sec.basis.rows(); ++i)
          tv[static_cast<Eigen::Index>(translate(static_cast<Bits>(i), n))] += sec.basis(i, c);
        CHECK((tv - std::polar(1.0, sec.momentum) * sec.basis.col(c)).norm() < 1e-12);
      }
      CMatrix next(all.rows(), all.cols() + sec.basis.cols());
      next << all, sec.basis;
      all = next;
    }
    CHECK(total == static_cast<Eigen::Index>(space.dim()));
    CHECK((all.adjoint() * all - CMatrix::Identity(total, total)).cwiseAbs().maxCoeff() < 1e-12);
  }

  const auto east = build_space(6, SpaceKind::Full, Boundary::Periodic);
  const std::vector<Bits> frozen{0b111111};
  Eigen::Index total = 0;
  for (int m = 0; m < 6; ++m) total += momentum_project(east, m, frozen).basis.cols();
  CHECK(total == 63);
  CHECK_THROWS_AS(momentum_project(build_space(4, SpaceKind::Full, Boundary::Open), 0), ValidationError);
}

TEST_CASE("space manifest") {
  const auto s = filter_parity(build_space(4, SpaceKind::Full, Boundary::Open), -1);
  const auto m = s.manifest();
  CHECK(m.find("dim=8") != std::string::npos);
}
