#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace prw {

/// Uniform cell-centered grid on [-L_x, L_x] x [0, 1), periodic in y.
/// Cell (i, j) is stored at i * ny + j (y fastest).
struct Grid
{
    int nx = 0;
    int ny = 0;
    double L_x = 1.0;

    double dx() const { return 2.0 * L_x / nx; }
    double dy() const { return 1.0 / ny; }
    double cell_area() const { return dx() * dy(); }
    double x(int i) const { return -L_x + (i + 0.5) * dx(); }
    double y(int j) const { return (j + 0.5) * dy(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }

    std::vector<double> x_centers() const
    {
        std::vector<double> xs(nx);
        for (int i = 0; i < nx; ++i) xs[i] = x(i);
        return xs;
    }

    bool operator==(const Grid&) const = default;
};

/// Conserved fields (rho, rho u, rho v) on the strip at one instant.
struct FlowState
{
    double time = 0.0;
    Grid grid;
    std::vector<double> rho;
    std::vector<double> mx;
    std::vector<double> my;

    FlowState() = default;
    FlowState(const Grid& g, double t)
        : time(t), grid(g), rho(g.size(), 0.0), mx(g.size(), 0.0), my(g.size(), 0.0)
    {
    }

    double u(std::size_t k) const { return mx[k] / rho[k]; }
    double v(std::size_t k) const { return my[k] / rho[k]; }

    double total_mass() const
    {
        double m = 0.0;
        for (double r : rho) m += r;
        return m * grid.cell_area();
    }
};

} // namespace prw
