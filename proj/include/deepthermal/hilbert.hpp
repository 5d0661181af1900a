#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deepthermal/types.hpp"

namespace deepthermal::hilbert {

enum class SpaceKind { Full, Blockaded };
enum class Boundary { Open, Periodic };

std::string to_string(SpaceKind kind);
std::string to_string(Boundary bc);

/// Site-ordered text form of a configuration: character j-1 is site j ('1' = up).
std::string config_to_string(Bits bits, int n_sites);
Bits config_from_string(const std::string& text);

/// Z_P = prod_j sigma^z_j eigenvalue of a configuration, (-1)^{#down}.
int parity_of(Bits bits, int n_sites);

/// Ordered enumeration of admissible configurations on a chain.
///
/// Configurations are sorted by integer value, so index lookups are a
/// bijection onto 0..dim-1. Copies share the immutable storage.
class BasisSpace {
 public:
  int sites() const { return data_->n; }
  SpaceKind kind() const { return data_->kind; }
  Boundary boundary() const { return data_->bc; }
  std::optional<int> sector() const { return data_->sector; }

  std::size_t dim() const { return data_->configs.size(); }
  Bits config(std::size_t i) const { return data_->configs[i]; }
  const std::vector<Bits>& configs() const { return data_->configs; }

  /// -1 when the configuration is not part of the space.
  std::int64_t index_of(Bits bits) const;
  bool contains(Bits bits) const { return index_of(bits) >= 0; }

  /// Full space without sector: index_of(bits) == bits.
  bool identity_indexed() const { return data_->kind == SpaceKind::Full && !data_->sector; }

  std::uint64_t hash() const { return data_->hash; }
  std::string manifest() const;

  bool same_as(const BasisSpace& other) const;

  // Construction goes through build_space / filter_parity / blockaded_open.
  struct Data {
    int n = 0;
    SpaceKind kind = SpaceKind::Full;
    Boundary bc = Boundary::Open;
    std::optional<int> sector;
    std::vector<Bits> configs;
    std::vector<std::int32_t> lookup;  // dense table, empty when identity indexed or too large
    std::uint64_t hash = 0;
  };
  BasisSpace() : data_(std::make_shared<const Data>()) {}
  explicit BasisSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

 private:
  std::shared_ptr<const Data> data_;
};

BasisSpace build_space(int n_sites, SpaceKind kind, Boundary bc);

/// Keep configurations with Z_P eigenvalue `target` (+1 or -1). Full spaces only.
BasisSpace filter_parity(const BasisSpace& space, int target);

enum class Postselect { None, BoundaryDown, ParityB };

struct PostselectRule {
  Postselect tag = Postselect::None;
  int target = +1;  // Z_{P,B} eigenvalue kept by ParityB

  bool operator==(const PostselectRule&) const = default;
};

std::string to_string(const PostselectRule& rule);

/// A = sites 1..n_a, B = the rest. z_B strings are stored as integers over the
/// B sites (bit 0 = site n_a + 1).
class Bipartition {
 public:
  const BasisSpace& parent() const { return parent_; }
  const BasisSpace& a_space() const { return a_space_; }
  int n_a() const { return n_a_; }
  int n_b() const { return parent_.sites() - n_a_; }
  const PostselectRule& rule() const { return rule_; }
  const std::vector<Bits>& admissible_zb() const { return zb_; }
  double n_b_eff() const { return n_b_eff_; }
  std::optional<int> a_parity() const { return a_parity_; }

  /// Parent index of (a_space config a, admissible z_B number b); -1 if the
  /// concatenation is not a parent configuration.
  std::span<const std::int64_t> row(std::size_t b) const {
    const std::size_t d = a_space_.dim();
    return {table_.data() + b * d, d};
  }

  Bits join(Bits a, Bits zb) const { return a | (zb << n_a_); }

  friend Bipartition bipartition(const BasisSpace& space, int n_a, PostselectRule rule);

 private:
  Bipartition(BasisSpace parent, BasisSpace a_space) : parent_(std::move(parent)), a_space_(std::move(a_space)) {}

  BasisSpace parent_;
  BasisSpace a_space_;
  int n_a_ = 0;
  PostselectRule rule_;
  std::vector<Bits> zb_;
  double n_b_eff_ = 0.0;
  std::optional<int> a_parity_;
  std::vector<std::int64_t> table_;
};

Bipartition bipartition(const BasisSpace& space, int n_a, PostselectRule rule);

/// Cyclic translation: site j -> j+1, site N -> 1.
Bits translate(Bits bits, int n_sites);

struct MomentumSector {
  int m = 0;
  int n_sites = 0;
  double momentum = 0.0;  // K = 2 pi m / N
  CMatrix basis;          // parent dim x sector dim, orthonormal columns
  std::vector<Bits> representatives;
};

/// Orthonormal basis of the sector where T v = e^{iK} v, built from orbit
/// representatives. Configurations in `excluded` (e.g. frozen states) and
/// their orbits are left out.
MomentumSector momentum_project(const BasisSpace& space, int m, std::span<const Bits> excluded = {});

}  // namespace deepthermal::hilbert
