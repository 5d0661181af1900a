#include "deepthermal/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "deepthermal/error.hpp"
#include "deepthermal/rng.hpp"

namespace deepthermal::hilbert {

namespace {

constexpr int kLookupMaxSites = 24;

Bits all_ones(int n) { return n >= 64 ? ~Bits{0} : ((Bits{1} << n) - 1); }

bool blockade_ok(Bits s, int n, Boundary bc) {
  if (s & (s >> 1)) return false;
  if (bc == Boundary::Periodic && n > 1 && (s & 1) && ((s >> (n - 1)) & 1)) return false;
  return true;
}

BasisSpace finish(BasisSpace::Data data) {
  if (!(data.kind == SpaceKind::Full && !data.sector) && data.n <= kLookupMaxSites) {
    data.lookup.assign(std::size_t{1} << data.n, -1);
    for (std::size_t i = 0; i < data.configs.size(); ++i)
      data.lookup[data.configs[i]] = static_cast<std::int32_t>(i);
  }
  std::uint64_t h = fnv1a64(data.configs.data(), data.configs.size() * sizeof(Bits));
  h = fnv1a64(&data.n, sizeof(data.n), h);
  data.hash = h;
  return BasisSpace(std::make_shared<const BasisSpace::Data>(std::move(data)));
}

}  // namespace

std::string to_string(SpaceKind kind) { return kind == SpaceKind::Full ? "full" : "blockaded"; }
std::string to_string(Boundary bc) { return bc == Boundary::Open ? "open" : "periodic"; }

std::string to_string(const PostselectRule& rule) {
  switch (rule.tag) {
    case Postselect::None:
      return "none";
    case Postselect::BoundaryDown:
      return "boundary_down";
    case Postselect::ParityB:
      return rule.target > 0 ? "parity_B(+1)" : "parity_B(-1)";
  }
  return "?";
}

std::string config_to_string(Bits bits, int n_sites) {
  std::string s(static_cast<std::size_t>(n_sites), '0');
  for (int j = 0; j < n_sites; ++j)
    if ((bits >> j) & 1) s[static_cast<std::size_t>(j)] = '1';
  return s;
}

Bits config_from_string(const std::string& text) {
  if (text.empty() || text.size() > static_cast<std::size_t>(kMaxSites))
    throw ValidationError("config string must have 1.." + std::to_string(kMaxSites) + " characters");
  Bits b = 0;
  for (std::size_t j = 0; j < text.size(); ++j) {
    if (text[j] == '1')
      b |= Bits{1} << j;
    else if (text[j] != '0')
      throw ValidationError("config string may only contain '0' and '1': " + text);
  }
  return b;
}

int parity_of(Bits bits, int n_sites) {
  const int downs = n_sites - std::popcount(bits & all_ones(n_sites));
  return (downs % 2 == 0) ? 1 : -1;
}

std::int64_t BasisSpace::index_of(Bits bits) const {
  const auto& d = *data_;
  if (bits > all_ones(d.n)) return -1;
  if (identity_indexed()) return static_cast<std::int64_t>(bits);
  if (!d.lookup.empty()) return d.lookup[bits];
  auto it = std::lower_bound(d.configs.begin(), d.configs.end(), bits);
  if (it == d.configs.end() || *it != bits) return -1;
  return it - d.configs.begin();
}

std::string BasisSpace::manifest() const {
  std::ostringstream os;
  os << "N=" << sites() << " kind=" << to_string(kind()) << " bc=" << to_string(boundary())
     << " sector=" << (sector() ? std::to_string(*sector()) : std::string("none")) << " dim=" << dim()
     << " hash=" << std::hex << hash();
  return os.str();
}

bool BasisSpace::same_as(const BasisSpace& other) const {
  return data_ == other.data_ || (sites() == other.sites() && kind() == other.kind() &&
                                  boundary() == other.boundary() && sector() == other.sector() &&
                                  hash() == other.hash() && configs() == other.configs());
}

BasisSpace build_space(int n_sites, SpaceKind kind, Boundary bc) {
  if (n_sites < 2 || n_sites > kMaxSites)
    throw ValidationError("build_space: N must be in 2.." + std::to_string(kMaxSites));
  if (kind == SpaceKind::Blockaded && bc == Boundary::Periodic && n_sites < 3)
    throw ValidationError("build_space: blockaded periodic chain needs N >= 3");
  BasisSpace::Data d;
  d.n = n_sites;
  d.kind = kind;
  d.bc = bc;
  const Bits end = Bits{1} << n_sites;
  if (kind == SpaceKind::Full) {
    d.configs.resize(end);
    for (Bits s = 0; s < end; ++s) d.configs[s] = s;
  } else {
    for (Bits s = 0; s < end; ++s)
      if (blockade_ok(s, n_sites, bc)) d.configs.push_back(s);
  }
  return finish(std::move(d));
}

BasisSpace filter_parity(const BasisSpace& space, int target) {
  if (space.kind() != SpaceKind::Full) throw ValidationError("filter_parity: requires a full space");
  if (target != 1 && target != -1) throw ValidationError("filter_parity: target must be +1 or -1");
  if (space.sector() && *space.sector() != target)
    throw ValidationError("filter_parity: space already restricted to the other sector");
  BasisSpace::Data d;
  d.n = space.sites();
  d.kind = space.kind();
  d.bc = space.boundary();
  d.sector = target;
  for (Bits s : space.configs())
    if (parity_of(s, d.n) == target) d.configs.push_back(s);
  if (d.configs.empty()) throw NumericError("filter_parity: empty sector");
  return finish(std::move(d));
}

Bipartition bipartition(const BasisSpace& space, int n_a, PostselectRule rule) {
  const int n = space.sites();
  if (n_a < 1 || n_a > n - 2) throw ValidationError("bipartition: need 1 <= N_A <= N-2");
  if (rule.tag == Postselect::ParityB) {
    if (!space.sector()) throw ValidationError("bipartition: parity_B postselection needs a parity-sector space");
    if (rule.target != 1 && rule.target != -1) throw ValidationError("bipartition: parity_B target must be +/-1");
  }
  if (rule.tag == Postselect::BoundaryDown && space.kind() != SpaceKind::Blockaded)
    throw ValidationError("bipartition: boundary_down postselection is only defined for blockaded spaces");

  const int n_b = n - n_a;
  const Bits a_mask = all_ones(n_a);
  auto passes = [&](Bits zb) {
    switch (rule.tag) {
      case Postselect::None:
        return true;
      case Postselect::BoundaryDown:
        return (zb & 1) == 0;
      case Postselect::ParityB:
        return parity_of(zb, n_b) == rule.target;
    }
    return false;
  };

  std::set<Bits> zb_set, a_set;
  for (Bits s : space.configs()) {
    const Bits zb = s >> n_a;
    if (!passes(zb)) continue;
    zb_set.insert(zb);
    a_set.insert(s & a_mask);
  }
  if (zb_set.empty()) throw ValidationError("bipartition: no admissible z_B strings");

  // A-space: the smallest standard space holding every reachable A configuration.
  std::optional<int> a_parity;
  BasisSpace a_space = [&] {
    if (space.kind() == SpaceKind::Blockaded) return build_space(std::max(n_a, 2), SpaceKind::Blockaded, Boundary::Open);
    BasisSpace full = build_space(std::max(n_a, 2), SpaceKind::Full, Boundary::Open);
    if (rule.tag == Postselect::ParityB) {
      a_parity = *space.sector() * rule.target;
      if (n_a >= 2) return filter_parity(full, *a_parity);
    }
    return full;
  }();
  if (n_a == 1) {
    // Single-site A: build_space needs N >= 2, so assemble it directly.
    BasisSpace::Data d;
    d.n = 1;
    d.kind = space.kind();
    d.bc = Boundary::Open;
    if (a_parity) {
      d.sector = a_parity;
      d.configs = {*a_parity > 0 ? Bits{1} : Bits{0}};
    } else {
      d.configs = {0, 1};
    }
    a_space = finish(std::move(d));
  }
  if (std::vector<Bits>(a_set.begin(), a_set.end()) != a_space.configs())
    throw ValidationError("bipartition: reachable A configurations do not form a standard space");

  Bipartition bp(space, a_space);
  bp.n_a_ = n_a;
  bp.rule_ = rule;
  bp.zb_.assign(zb_set.begin(), zb_set.end());
  bp.n_b_eff_ = std::log2(static_cast<double>(bp.zb_.size()));
  bp.a_parity_ = a_parity;
  const std::size_t d_a = a_space.dim();
  bp.table_.resize(bp.zb_.size() * d_a);
  for (std::size_t b = 0; b < bp.zb_.size(); ++b)
    for (std::size_t a = 0; a < d_a; ++a) bp.table_[b * d_a + a] = space.index_of(bp.join(a_space.config(a), bp.zb_[b]));
  return bp;
}

Bits translate(Bits bits, int n_sites) {
  const Bits mask = all_ones(n_sites);
  return ((bits << 1) | (bits >> (n_sites - 1))) & mask;
}

MomentumSector momentum_project(const BasisSpace& space, int m, std::span<const Bits> excluded) {
  if (space.boundary() != Boundary::Periodic) throw ValidationError("momentum_project: requires periodic boundaries");
  const int n = space.sites();
  m = ((m % n) + n) % n;
  MomentumSector sec;
  sec.m = m;
  sec.n_sites = n;
  sec.momentum = 2.0 * std::numbers::pi * m / n;

  std::vector<char> seen(space.dim(), 0);
  for (Bits e : excluded) {
    Bits s = e;
    for (int j = 0; j < n; ++j, s = translate(s, n))
      if (auto i = space.index_of(s); i >= 0) seen[static_cast<std::size_t>(i)] = 1;
  }

  std::vector<CVector> columns;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    if (seen[i]) continue;
    const Bits rep = space.config(i);
    CVector v = CVector::Zero(static_cast<Eigen::Index>(space.dim()));
    Bits s = rep;
    for (int shift = 0; shift < n; ++shift, s = translate(s, n)) {
      const auto idx = space.index_of(s);
      if (idx < 0) throw ValidationError("momentum_project: space is not translation invariant");
      seen[static_cast<std::size_t>(idx)] = 1;
      v[idx] += std::polar(1.0, -sec.momentum * shift);
    }
    const double norm = v.norm();
    if (norm < 1e-9) continue;
    columns.push_back(v / norm);
    sec.representatives.push_back(rep);
  }
  sec.basis.resize(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) sec.basis.col(static_cast<Eigen::Index>(c)) = columns[c];
  return sec;
}

}  // namespace deepthermal::hilbert
