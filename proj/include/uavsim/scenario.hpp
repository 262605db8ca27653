#pragma once

#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace uavsim {

// Layout of the monitored area and the sensor/demand generation parameters.
struct GridSpec {
    int cells_per_side = 8;        // H
    double cell_size_m = 50.0;
    double altitude_m = 100.0;
    double dense_ratio = 0.3;      // fraction of cells in the dense group
    double lambda_dense = 10.0;    // mean SNs per dense cell
    double lambda_sparse = 1.0;    // mean SNs per sparse cell
    double data_density = 0.3;     // phi: mean active cells = phi * H^2
    double data_min_bits = 0.1e6;  // demand drawn uniformly from this range
    double data_max_bits = 1.0e6;

    int cell_count() const { return cells_per_side * cells_per_side; }
    int cell_col(int c) const { return c % cells_per_side; }
    int cell_row(int c) const { return c / cells_per_side; }
    int cell_index(int col, int row) const { return row * cells_per_side + col; }
    double center_x(int c) const { return (cell_col(c) + 0.5) * cell_size_m; }
    double center_y(int c) const { return (cell_row(c) + 0.5) * cell_size_m; }
    void validate() const;
};

struct SensorNode {
    int id = 0;
    int cell = 0;
    double x = 0.0;          // absolute coordinates, inside the owning cell
    double y = 0.0;
    double demand_bits = 0.0; // 0 for inactive SNs
};

struct Scenario {
    std::vector<SensorNode> nodes;
    std::vector<double> cell_demand_bits; // per-cell total, H^2 entries

    double total_demand_bits() const;
};

// Draws a scenario: cells are split dense/sparse, SN counts are Poisson, the
// number of demand-carrying cells is Poisson(phi*H^2) capped at H^2, and each
// SN in an active cell draws a uniform demand.
Scenario generate_scenario(const GridSpec& spec, std::mt19937_64& rng);

// Versioned text serialization, one record per SN, byte-stable for a given
// scenario.  See README for the format.
std::string serialize_scenario(const GridSpec& spec, const Scenario& s);
Scenario parse_scenario(const GridSpec& spec, std::istream& in);

} // namespace uavsim
