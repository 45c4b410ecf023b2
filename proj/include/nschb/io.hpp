#pragma once
// Snapshot and report I/O. Field snapshots are one CSV per field, row-major,
// full double precision, with the metadata header
//   # nx,ny,lx,ly,bc,name,time
// where bc is one of neumann, dirichlet, noslip_ux, noslip_uy (the latter two
// fix the staggered array shape).

#include <string>
#include <vector>

#include "nschb/diagnostics.hpp"
#include "nschb/fields.hpp"

namespace nschb {

void write_scalar_csv(const std::string& path, const ScalarField& f, const std::string& name,
                      double time);
ScalarField read_scalar_csv(const std::string& path, double* time_out = nullptr,
                            std::string* name_out = nullptr);

void write_mac_csv(const std::string& ux_path, const std::string& uy_path,
                   const MACVectorField& u, const std::string& name, double time);
MACVectorField read_mac_csv(const std::string& ux_path, const std::string& uy_path,
                            double* time_out = nullptr);

class EnergyCsvWriter {
  public:
    explicit EnergyCsvWriter(const std::string& path);
    ~EnergyCsvWriter();
    void row(const EnergyReport& r);

  private:
    void* f_ = nullptr;
};

class InvariantCsvWriter {
  public:
    explicit InvariantCsvWriter(const std::string& path);
    ~InvariantCsvWriter();
    void row(double t, const InvariantReport& r);

  private:
    void* f_ = nullptr;
};

class ModesCsvWriter {
  public:
    ModesCsvWriter(const std::string& path, int m);
    ~ModesCsvWriter();
    void row(double t, const std::vector<double>& coeffs);

  private:
    void* f_ = nullptr;
};

}  // namespace nschb
