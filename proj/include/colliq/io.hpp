// io.hpp — File formats: rate-tensor and amplitude-table JSON, trajectory and
// ensemble CSV with JSON diagnostics sidecars. Doubles are written with
// shortest round-trip precision, so write-read-write is byte stable.
#pragma once

#include <string>

#include "colliq/jumps.hpp"
#include "colliq/lindblad.hpp"
#include "colliq/scattering.hpp"
#include "colliq/thermal.hpp"

namespace colliq::io {

struct RatesFile {
  thermal::RateTensor rates;
  thermal::EnergyShifts shifts;
  std::string provenance;  // resolved configuration block, serialized JSON
};

// JSON document holding the chi-active tensor entries, the energy shifts, the
// validation diagnostics, and the resolved configuration. provenance_json may
// be empty or a serialized JSON object.
void write_rates_file(const std::string& path, const thermal::RateTensor& rates,
                      const thermal::EnergyShifts& shifts, const thermal::RateDiagnostics& diag,
                      const std::string& provenance_json);
// Parses and fully revalidates; malformed or physically invalid files raise
// ConfigError.
RatesFile read_rates_file(const std::string& path);

// Amplitude tables keyed "exit<-entrance" over an (entrance kinetic energy,
// cos theta) grid. The mass comes from the caller, not the file.
scattering::AmplitudeTable read_amplitude_table(const std::string& path, double mass);
void write_amplitude_table(const std::string& path, const scattering::AmplitudeTable& table);

// Columns: t, then re/im of every density-matrix entry in row-major channel
// order, headed by the channel labels. Values are %.17g.
void write_trajectory_csv(const std::string& path, const scattering::ChannelSet& channels,
                          const lindblad::TrajectoryRecord& record);
void write_trajectory_diagnostics(const std::string& path,
                                  const lindblad::TrajectoryRecord& record,
                                  const std::string& provenance_json);

// Same layout as the trajectory CSV plus trailing stderr_ columns for every
// entry.
void write_ensemble_csv(const std::string& path, const scattering::ChannelSet& channels,
                        const jumps::EnsembleRecord& record);
void write_ensemble_diagnostics(const std::string& path, const jumps::EnsembleRecord& record,
                                std::size_t n_traj, std::uint64_t master_seed,
                                const std::string& provenance_json);

}  // namespace colliq::io
