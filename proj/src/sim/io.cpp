#include "nschb/io.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace nschb {

namespace {

const char* bc_token(ScalarBC bc) {
    return bc == ScalarBC::HomogeneousNeumann ? "neumann" : "dirichlet";
}

void write_grid_csv(std::FILE* f, const Grid& g, const char* bc, const std::string& name,
                    double time, const double* data, int cols, int rows) {
    std::fprintf(f, "# %d,%d,%.17g,%.17g,%s,%s,%.17g\n", g.nx, g.ny, g.lx, g.ly, bc,
                 name.c_str(), time);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c)
            std::fprintf(f, c + 1 < cols ? "%.17g," : "%.17g", data[static_cast<std::size_t>(r) * cols + c]);
        std::fputc('\n', f);
    }
}

struct Header {
    int nx, ny;
    double lx, ly;
    std::string bc, name;
    double time;
};

Header parse_header(std::FILE* f, const std::string& path) {
    char line[512];
    if (!std::fgets(line, sizeof line, f))
        throw std::runtime_error("snapshot read failed: " + path);
    Header h;
    char bc[64], name[128];
    if (std::sscanf(line, "# %d,%d,%lf,%lf,%63[^,],%127[^,],%lf", &h.nx, &h.ny, &h.lx, &h.ly, bc,
                    name, &h.time) != 7)
        throw std::runtime_error("snapshot header malformed: " + path);
    h.bc = bc;
    h.name = name;
    return h;
}

void read_values(std::FILE* f, double* data, std::size_t count, const std::string& path) {
    for (std::size_t i = 0; i < count; ++i) {
        if (std::fscanf(f, i % 1 == 0 ? " %lf" : "%lf", &data[i]) != 1)
            throw std::runtime_error("snapshot truncated: " + path);
        int c = std::fgetc(f);
        if (c != ',' && c != '\n' && c != '\r' && c != EOF)
            std::ungetc(c, f);
        if (c == '\r') {
            c = std::fgetc(f);
            if (c != '\n') std::ungetc(c, f);
        }
    }
}

std::FILE* open_or_throw(const std::string& path, const char* mode) {
    std::FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw std::runtime_error("cannot open " + path);
    return f;
}

}  // namespace

void write_scalar_csv(const std::string& path, const ScalarField& f, const std::string& name,
                      double time) {
    std::FILE* fp = open_or_throw(path, "w");
    write_grid_csv(fp, f.grid(), bc_token(f.bc()), name, time, f.data(), f.grid().nx,
                   f.grid().ny);
    std::fclose(fp);
}

ScalarField read_scalar_csv(const std::string& path, double* time_out, std::string* name_out) {
    std::FILE* fp = open_or_throw(path, "r");
    Header h = parse_header(fp, path);
    Grid g(h.nx, h.ny, h.lx, h.ly);
    ScalarBC bc = h.bc == "dirichlet" ? ScalarBC::HomogeneousDirichlet
                                      : ScalarBC::HomogeneousNeumann;
    ScalarField f(g, bc);
    read_values(fp, f.data(), f.size(), path);
    std::fclose(fp);
    if (time_out) *time_out = h.time;
    if (name_out) *name_out = h.name;
    return f;
}

void write_mac_csv(const std::string& ux_path, const std::string& uy_path,
                   const MACVectorField& u, const std::string& name, double time) {
    const Grid& g = u.grid();
    std::FILE* fx = open_or_throw(ux_path, "w");
    write_grid_csv(fx, g, "noslip_ux", name + "_ux", time, u.ux_data(), g.nx + 1, g.ny);
    std::fclose(fx);
    std::FILE* fy = open_or_throw(uy_path, "w");
    write_grid_csv(fy, g, "noslip_uy", name + "_uy", time, u.uy_data(), g.nx, g.ny + 1);
    std::fclose(fy);
}

MACVectorField read_mac_csv(const std::string& ux_path, const std::string& uy_path,
                            double* time_out) {
    std::FILE* fx = open_or_throw(ux_path, "r");
    Header hx = parse_header(fx, ux_path);
    if (hx.bc != "noslip_ux") {
        std::fclose(fx);
        throw std::runtime_error("expected noslip_ux snapshot: " + ux_path);
    }
    Grid g(hx.nx, hx.ny, hx.lx, hx.ly);
    MACVectorField u(g);
    read_values(fx, u.ux_data(), static_cast<std::size_t>(g.xfaces()), ux_path);
    std::fclose(fx);

    std::FILE* fy = open_or_throw(uy_path, "r");
    Header hy = parse_header(fy, uy_path);
    if (hy.bc != "noslip_uy" || hy.nx != g.nx || hy.ny != g.ny) {
        std::fclose(fy);
        throw std::runtime_error("mismatched noslip_uy snapshot: " + uy_path);
    }
    read_values(fy, u.uy_data(), static_cast<std::size_t>(g.yfaces()), uy_path);
    std::fclose(fy);
    if (time_out) *time_out = hx.time;
    return u;
}

EnergyCsvWriter::EnergyCsvWriter(const std::string& path) {
    std::FILE* f = open_or_throw(path, "w");
    std::fprintf(f,
                 "t,kinetic,interfacial,potential_int,e1,beta,grad_mu_sq,grad_u_sq,gamma,"
                 "g_script,theta_holder\n");
    f_ = f;
}
EnergyCsvWriter::~EnergyCsvWriter() {
    if (f_) std::fclose(static_cast<std::FILE*>(f_));
}
void EnergyCsvWriter::row(const EnergyReport& r) {
    std::fprintf(static_cast<std::FILE*>(f_),
                 "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                 r.kinetic, r.interfacial, r.potential_int, r.e1, r.beta, r.grad_mu_sq,
                 r.grad_u_sq, r.gamma, r.g_script, r.theta_holder);
}

InvariantCsvWriter::InvariantCsvWriter(const std::string& path) {
    std::FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "t,mass_drift,theta_max_excess,min_separation,energy_violations,"
                    "divergence_max\n");
    f_ = f;
}
InvariantCsvWriter::~InvariantCsvWriter() {
    if (f_) std::fclose(static_cast<std::FILE*>(f_));
}
void InvariantCsvWriter::row(double t, const InvariantReport& r) {
    std::fprintf(static_cast<std::FILE*>(f_), "%.17g,%.17g,%.17g,%.17g,%ld,%.17g\n", t,
                 r.mass_drift, r.theta_max_excess, r.min_separation, r.energy_violations,
                 r.divergence_max);
}

ModesCsvWriter::ModesCsvWriter(const std::string& path, int m) {
    std::FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "t");
    for (int i = 1; i <= m; ++i) std::fprintf(f, ",g%d", i);
    std::fputc('\n', f);
    f_ = f;
}
ModesCsvWriter::~ModesCsvWriter() {
    if (f_) std::fclose(static_cast<std::FILE*>(f_));
}
void ModesCsvWriter::row(double t, const std::vector<double>& coeffs) {
    std::FILE* f = static_cast<std::FILE*>(f_);
    std::fprintf(f, "%.17g", t);
    for (double c : coeffs) std::fprintf(f, ",%.17g", c);
    std::fputc('\n', f);
}

}  // namespace nschb
