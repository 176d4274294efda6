#include "lfc/topology.hpp"

#include <cstdio>
#include <queue>
#include <stdexcept>

namespace lfc {

// Symmetric tie-line distances in 10^3 km, indexed by kIsoCodes order.
const std::array<std::array<double, kAreaCount>, kAreaCount> kTieDistanceTable = {{
    // AT    BE    BG    HR    CZ    DK    EE    FI    FR    DE    GR    HU    IE    IT    LV    LT    NL    NO    PL    PT    RO    SK    SI    ES    SE    CH
    {0, 0, 0, 0, 2.65, 0, 0, 0, 0, 4.82, 0, 5.61, 0, 4.76, 0, 0, 0, 0, 0, 0, 0, 5.88, 1.85, 0, 0, 5.58},        // AT
    {0, 0, 0, 0, 0, 0, 0, 0, 4.69, 5.77, 0, 0, 13.19, 0, 0, 0, 1.75, 0, 0, 0, 0, 0, 0, 0, 0, 0},                // BE
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4.02, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3.01, 0, 0, 0, 0, 0},                       // BG
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3.61, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2.12, 0, 0, 0},                       // HR
    {2.65, 0, 0, 0, 0, 0, 0, 0, 0, 5.13, 0, 0, 0, 0, 0, 0, 0, 0, 4.67, 0, 0, 4.33, 0, 0, 0, 0},                 // CZ
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 5.03, 0, 0, 17.82, 0, 0, 0, 5.44, 11.56, 0, 0, 0, 0, 0, 0, 10.22, 0},           // DK
    {0, 0, 0, 0, 0, 0, 0, 6.37, 0, 0, 0, 0, 0, 0, 2.2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},                        // EE
    {0, 0, 0, 0, 0, 0, 6.37, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 8.99, 0, 0, 0, 0, 0, 0, 8.89, 0},                    // FI
    {0, 4.69, 0, 0, 0, 0, 0, 0, 0, 9.35, 0, 0, 12.38, 11.19, 0, 0, 0, 0, 0, 0, 0, 0, 0, 8.58, 0, 6.09},         // FR
    {4.82, 5.77, 0, 0, 5.13, 5.03, 0, 0, 9.35, 0, 0, 0, 0, 0, 0, 0, 4.98, 15.23, 9.06, 0, 0, 0, 0, 0, 13.41, 4.84},  // DE
    {0, 0, 4.02, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 10.94, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},                      // GR
    {5.61, 0, 0, 3.61, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 5.87, 1.48, 4.63, 0, 0, 0},              // HU
    {0, 13.19, 0, 0, 0, 17.82, 0, 0, 12.38, 0, 0, 0, 0, 0, 0, 0, 13.84, 27.51, 0, 0, 0, 0, 0, 0, 0, 0},         // IE
    {4.76, 0, 0, 0, 0, 0, 0, 0, 11.19, 0, 10.94, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3.81, 0, 0, 5.84},            // IT
    {0, 0, 0, 0, 0, 0, 2.2, 0, 0, 0, 0, 0, 0, 0, 0, 1.69, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},                        // LV
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1.69, 0, 0, 0, 5.55, 0, 0, 0, 0, 0, 10.14, 0},                   // LT
    {0, 1.75, 0, 0, 0, 5.44, 0, 0, 0, 4.98, 0, 0, 13.84, 0, 0, 0, 0, 16.99, 0, 0, 0, 0, 0, 0, 0, 0},            // NL
    {0, 0, 0, 0, 0, 11.56, 0, 8.99, 0, 15.23, 0, 0, 27.51, 0, 0, 0, 16.99, 0, 0, 0, 0, 0, 0, 0, 2.28, 0},       // NO
    {0, 0, 0, 0, 4.67, 0, 0, 0, 0, 9.06, 0, 0, 0, 0, 0, 5.55, 0, 0, 0, 0, 0, 3.37, 0, 0, 10.93, 0},             // PL
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4.34, 0, 0},                          // PT
    {0, 0, 3.01, 0, 0, 0, 0, 0, 0, 0, 0, 5.87, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},                       // RO
    {5.88, 0, 0, 0, 4.33, 0, 0, 0, 0, 0, 0, 1.48, 0, 0, 0, 0, 0, 0, 3.37, 0, 0, 0, 0, 0, 0, 0},                 // SK
    {1.85, 0, 0, 2.12, 0, 0, 0, 0, 0, 0, 0, 4.63, 0, 3.81, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},                 // SI
    {0, 0, 0, 0, 0, 0, 0, 0, 8.58, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4.34, 0, 0, 0, 0, 0, 0},                       // ES
    {0, 0, 0, 0, 0, 10.22, 0, 8.89, 0, 13.41, 0, 0, 0, 0, 0, 10.14, 0, 2.28, 10.93, 0, 0, 0, 0, 0, 0, 0},       // SE
    {5.58, 0, 0, 0, 0, 0, 0, 0, 6.09, 4.84, 0, 0, 0, 5.84, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},                 // CH
}};

double tie_coefficient(const TieLine& line) {
  if (line.d <= 0.0) throw std::invalid_argument("tie-line distance must be > 0");
  return line.k / line.d;
}

Topology::Topology(std::vector<TieLine> lines) : lines_(std::move(lines)) {
  for (const TieLine& line : lines_) {
    if (line.a == line.b) throw std::invalid_argument("tie line must connect distinct areas");
    if (line.a < 0 || line.a >= kAreaCount || line.b < 0 || line.b >= kAreaCount)
      throw std::invalid_argument("tie line area index out of range");
    const double t = tie_coefficient(line);
    adjacency_[line.a].push_back({line.b, t});
    adjacency_[line.b].push_back({line.a, t});
  }
}

bool Topology::connected() const {
  std::array<bool, kAreaCount> seen{};
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int count = 1;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (const Neighbor& nb : adjacency_[i]) {
      if (!seen[nb.area]) {
        seen[nb.area] = true;
        ++count;
        frontier.push(nb.area);
      }
    }
  }
  return count == kAreaCount;
}

std::string Topology::edge_list_csv() const {
  std::string out = "iso_a,iso_b,d_km,k\n";
  char buf[128];
  for (const TieLine& line : lines_) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g\n", std::string(kIsoCodes[line.a]).c_str(),
                  std::string(kIsoCodes[line.b]).c_str(), line.d, line.k);
    out += buf;
  }
  return out;
}

Topology build_eea_topology() {
  std::vector<TieLine> lines;
  for (int i = 0; i < kAreaCount; ++i) {
    for (int j = i + 1; j < kAreaCount; ++j) {
      const double entry = kTieDistanceTable[i][j];
      if (entry != 0.0) lines.push_back({i, j, entry * 1000.0, 1.0});
    }
  }
  return Topology(std::move(lines));
}

std::array<double, kAreaCount> tie_power(std::span<const double> angles, const Topology& topo) {
  if (angles.size() != static_cast<size_t>(kAreaCount))
    throw std::invalid_argument("tie_power expects 26 angle values");
  std::array<double, kAreaCount> out{};
  for (int i = 0; i < kAreaCount; ++i) {
    double acc = 0.0;
    for (const Topology::Neighbor& nb : topo.neighbors(i)) {
      acc += nb.coeff * (angles[i] - angles[nb.area]);
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace lfc
