#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinlaw/diagnostics.hpp"
#include "kinlaw/goursat.hpp"
#include "kinlaw/kinetic.hpp"
#include "kinlaw/lagrangian.hpp"
#include "kinlaw/viscous.hpp"

namespace kinlaw {

// Flat binary table: little-endian 64-bit floats, row-major (last axis
// fastest), dimensions and axis metadata in a sidecar JSON manifest.
// read(write(x)) is bit-exact.
struct AxisSpec {
    std::string name;
    int n = 0;
    double lo = 0.0, hi = 0.0;
};

void write_field(const std::filesystem::path& base, std::span<const double> data,
                 const std::vector<AxisSpec>& axes);
std::vector<double> read_field(const std::filesystem::path& base, std::vector<AxisSpec>& axes);

nlohmann::json read_json(const std::filesystem::path& file);
void write_json(const std::filesystem::path& file, const nlohmann::json& j);

// Directory formats. Every directory is self-describing via manifest.json.
void save_solution(const std::filesystem::path& dir, const GridSolution& sol);
GridSolution load_solution(const std::filesystem::path& dir);

void save_family(const std::filesystem::path& dir, const EntropyFamily& fam);
EntropyFamily load_family(const std::filesystem::path& dir, const SystemChart& chart);

void save_measure(const std::filesystem::path& dir, const MeasureEstimate& m,
                  const std::string& name);
MeasureEstimate load_measure(const std::filesystem::path& dir, const std::string& name);

void save_bundle(const std::filesystem::path& dir, const CurveBundle& bundle,
                 const std::string& name);
void save_qledger(const std::filesystem::path& dir, const QLedger& led);
void save_mask(const std::filesystem::path& dir, const JumpSetMask& mask);
void save_vmo(const std::filesystem::path& dir, const std::vector<VmoProfile>& profiles);
void save_energy(const std::filesystem::path& dir, const EnergyLedger& led);

}  // namespace kinlaw
