#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "segre/expression.hpp"
#include "segre/series.hpp"

namespace segre {

// Index layout of the ambient ring C[[Z, zeta]] = C[[z, w, chi, tau]] with
// z, chi in C^n and w, tau in C^d.
struct AmbientLayout {
  std::size_t N = 0;
  std::size_t d = 0;

  std::size_t n() const noexcept { return N - d; }
  std::size_t arity() const noexcept { return 2 * N; }
  std::size_t z(std::size_t i) const noexcept { return i; }
  std::size_t w(std::size_t l) const noexcept { return n() + l; }
  std::size_t chi(std::size_t i) const noexcept { return N + i; }
  std::size_t tau(std::size_t l) const noexcept { return N + n() + l; }
  BlockSplit split() const noexcept { return {N}; }

  VariableTable graph_names() const {
    VariableTable t;
    for (std::size_t i = 0; i < n(); ++i) t.add("z" + std::to_string(i + 1));
    for (std::size_t l = 0; l < d; ++l) t.add("w" + std::to_string(l + 1));
    for (std::size_t i = 0; i < n(); ++i) t.add("ch" + std::to_string(i + 1));
    for (std::size_t l = 0; l < d; ++l) t.add("ta" + std::to_string(l + 1));
    return t;
  }

  VariableTable rho_names() const {
    VariableTable t;
    for (std::size_t k = 0; k < N; ++k) t.add("Z" + std::to_string(k + 1));
    for (std::size_t k = 0; k < N; ++k) t.add("ze" + std::to_string(k + 1));
    return t;
  }

  // Names of the Z-block alone (z1.., w1..), for series in C[[Z]].
  std::vector<std::string> z_block_names() const {
    auto all = graph_names().names();
    return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(N)};
  }
};

// Graph form w = Q(z, chi, tau) of a generic manifold. Q and its sigma image
// Qbar(chi, z, w) are stored as series in all 2N ambient variables.
struct GraphForm {
  FormalMap Q;
  FormalMap Qbar;
  int valid_order = 0;
};

struct ManifoldSpec {
  enum class Form { graph, rho };

  int N = 0;
  int d = 0;
  Form form = Form::graph;
  std::vector<std::string> expressions;
  std::optional<std::vector<int>> split;  // 1-based Z indices of the w-coordinates
};

// A formal generic submanifold loaded at truncation order kappa. All series
// use the ambient layout, after the coordinate renumbering recorded in
// `coordinate_order` (internal Z position k holds original coordinate
// Z_{coordinate_order[k] + 1}).
struct GenericManifold {
  ManifoldSpec spec;
  AmbientLayout layout;
  int kappa = 0;
  GraphForm graph;
  FormalMap rho;
  std::vector<std::size_t> coordinate_order;

  std::size_t N() const noexcept { return layout.N; }
  std::size_t d() const noexcept { return layout.d; }
  std::size_t n() const noexcept { return layout.n(); }
  const FormalMap& Q() const noexcept { return graph.Q; }
};

}  // namespace segre
