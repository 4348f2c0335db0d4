#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "dascof/channel.hpp"
#include "dascof/rates.hpp"

namespace dascof {

enum class SelectionMode { none, random, greedy };
enum class ChannelModel { soft_handoff, rayleigh };

const char* selection_name(SelectionMode m);
const char* channel_model_name(ChannelModel m);

// Resolved description of one Monte Carlo sweep. Complex channel models run
// through the real expansion: each real dimension carries the configured
// per-dimension power (the CN(0,1) noise splits variance 1/2 per dimension,
// so the expanded model operates at twice the nominal linear SNR), rates are
// reported per complex symbol as the sum of the two real dimensions, and R0
// caps the per-complex-symbol rate.
struct ExperimentSpec {
  enum class Axis { r0, snr };

  std::vector<Scheme> schemes;
  ChannelModel model = ChannelModel::soft_handoff;
  Eigen::Index num_cells = 1;  // L
  Eigen::Index num_users = 1;  // K (rayleigh candidates; K = L otherwise)
  GammaSpec gamma = GammaSpec::fixed(0.0);
  Axis axis = Axis::r0;
  std::vector<double> grid;  // R0 in bits, or SNR in dB
  double snr_db = 20.0;      // fixed SNR when axis == r0
  double r0 = std::numeric_limits<double>::infinity();  // fixed R0 when axis == snr
  std::uint64_t p = 251;
  Eigen::Index trials = 100;
  std::uint64_t seed = 1;
  SelectionMode selection = SelectionMode::none;
  std::string out_path;

  void validate() const;  // throws ConfigError naming the offending field
};

struct CurvePoint {
  Scheme scheme{};
  double x = 0.0;
  double mean_rate = 0.0;
  double std_error = 0.0;
  double rank_deficiency_fraction = 0.0;
};

struct OverlayRow {
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

struct CurveSet {
  ExperimentSpec spec;
  std::vector<CurvePoint> points;  // scheme-major (spec order), x ascending
  std::vector<OverlayRow> overlays;
};

// Monte Carlo sweep over the grid: per point, per-trial symmetric rates over
// fresh channel realizations, the zero-rate convention on rank deficiency,
// and mean / standard error / deficiency fraction per scheme.
CurveSet run_sweep(const ExperimentSpec& spec);

// CSV with the resolved manifest in "# " header comments; byte-identical for
// identical spec + seed.
void emit_csv(const CurveSet& curves, std::ostream& out);
void emit_csv(const CurveSet& curves, const std::string& path);

// Externally supplied reference curves (columns label,x,y); never computed.
std::vector<OverlayRow> read_overlay_csv(const std::string& path);

// Flat key-value config with [experiment], [channel], [output] sections.
ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec load_config(const std::string& path);
std::string render_config(const ExperimentSpec& spec);

const char* build_id();

}  // namespace dascof
