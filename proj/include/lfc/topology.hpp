#pragma once
// The 26-node tie-line graph: embedded distance table, coupling
// coefficients T_ij = k_ij / d_ij, and the tie-line power map.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lfc/model.hpp"

namespace lfc {

/// Tie-line distances in 10^3 km, symmetric with zero diagonal.
/// A zero entry means the areas are not directly connected.
extern const std::array<std::array<double, kAreaCount>, kAreaCount> kTieDistanceTable;

struct TieLine {
  int a = 0;       // area index, a < b by construction
  int b = 0;
  double d = 0.0;  // distance [km]
  double k = 1.0;  // line gain [km*GW/deg]
};

/// Coupling coefficient k/d [GW/deg]. Rejects d <= 0.
double tie_coefficient(const TieLine& line);

class Topology {
 public:
  struct Neighbor {
    int area;
    double coeff;  // T_ij of the connecting line
  };

  explicit Topology(std::vector<TieLine> lines);

  const std::vector<TieLine>& lines() const { return lines_; }
  const std::vector<Neighbor>& neighbors(int area) const { return adjacency_[area]; }

  bool connected() const;

  /// Edge list as CSV (iso_a,iso_b,d_km,k), one line per tie line.
  std::string edge_list_csv() const;

 private:
  std::vector<TieLine> lines_;
  std::array<std::vector<Neighbor>, kAreaCount> adjacency_;
};

/// Topology built from the embedded distance table, with k = 1 on every line.
Topology build_eea_topology();

/// Net tie-line power per area [GW]:
///   P_tie_i = sum_{j in N(i)} T_ij * (d_delta_i - d_delta_j).
/// Pairwise antisymmetry makes the network-wide sum vanish.
std::array<double, kAreaCount> tie_power(std::span<const double> angles, const Topology& topo);

}  // namespace lfc
