#pragma once
// Uniform cell-centered rectangle (0,lx) x (0,ly) with nx x ny cells.
// Scalars live at cell centers, velocity components at faces (MAC layout),
// mixed tensor components at nodes.

#include <stdexcept>

namespace nschb {

struct Grid {
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    double dx = 0.0, dy = 0.0;

    Grid() = default;
    Grid(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        if (nx < 4 || ny < 4) throw std::invalid_argument("Grid: nx, ny must be >= 4");
        if (lx <= 0.0 || ly <= 0.0) throw std::invalid_argument("Grid: lx, ly must be > 0");
        dx = lx / nx;
        dy = ly / ny;
    }

    int cells() const { return nx * ny; }
    int xfaces() const { return (nx + 1) * ny; }
    int yfaces() const { return nx * (ny + 1); }
    int nodes() const { return (nx + 1) * (ny + 1); }
    double cell_volume() const { return dx * dy; }
    double area() const { return lx * ly; }

    // coordinates
    double xc(int i) const { return (i + 0.5) * dx; }
    double yc(int j) const { return (j + 0.5) * dy; }
    double xf(int i) const { return i * dx; }
    double yf(int j) const { return j * dy; }

    // linear indices
    int cidx(int i, int j) const { return j * nx + i; }
    int uxidx(int i, int j) const { return j * (nx + 1) + i; }  // i in [0,nx]
    int uyidx(int i, int j) const { return j * nx + i; }        // j in [0,ny]
    int nidx(int i, int j) const { return j * (nx + 1) + i; }   // node (i,j)

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace nschb
