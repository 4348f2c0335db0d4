#include "dascof/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dascof/chain.hpp"
#include "dascof/parallel.hpp"
#include "dascof/scheduling.hpp"

namespace dascof {

const char* selection_name(SelectionMode m) {
  switch (m) {
    case SelectionMode::none: return "none";
    case SelectionMode::random: return "random";
    case SelectionMode::greedy: return "greedy";
  }
  return "?";
}

const char* channel_model_name(ChannelModel m) {
  switch (m) {
    case ChannelModel::soft_handoff: return "soft_handoff";
    case ChannelModel::rayleigh: return "rayleigh";
  }
  return "?";
}

namespace {

bool is_downlink_scheme(Scheme s) {
  return s == Scheme::RQCoF || s == Scheme::RCoF || s == Scheme::IFBF_RQCoF ||
         s == Scheme::IFBF_RCoF || s == Scheme::CIFBF_RQCoF || s == Scheme::CIFBF_RCoF;
}

bool is_ifbf_family(Scheme s) {
  return s == Scheme::IFBF_RQCoF || s == Scheme::IFBF_RCoF || s == Scheme::CIFBF_RQCoF ||
         s == Scheme::CIFBF_RCoF;
}

bool is_cifbf(Scheme s) { return s == Scheme::CIFBF_RQCoF || s == Scheme::CIFBF_RCoF; }

double kahan_sum(const std::vector<double>& values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (schemes.empty()) throw ConfigError("experiment.schemes: at least one scheme required");
  for (Scheme s : schemes) {
    if (!is_downlink_scheme(s))
      throw ConfigError(std::string("experiment.schemes: '") + scheme_name(s) +
                        "' is a single-point computation rate, not a sweep scheme");
  }
  if (grid.empty()) throw ConfigError("experiment.grid: must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("experiment.grid: must be sorted ascending");
  if (trials < 1) throw ConfigError("experiment.trials: must be at least 1");
  if (!is_prime_u64(p)) throw ConfigError("experiment.p: must be prime");
  if (num_cells < 1) throw ConfigError("channel.L: must be at least 1");
  if (num_users < num_cells) throw ConfigError("channel.K: must be at least L");
  if (model == ChannelModel::soft_handoff) {
    if (num_users != num_cells) throw ConfigError("channel.K: soft_handoff serves exactly K = L users");
    if (selection != SelectionMode::none)
      throw ConfigError("experiment.selection: user selection applies to the rayleigh model only");
  }
  if (selection == SelectionMode::none && num_users != num_cells)
    throw ConfigError("channel.K: K > L requires a selection mode");

  const bool has_ifbf = std::any_of(schemes.begin(), schemes.end(), is_ifbf_family);
  if (has_ifbf && selection != SelectionMode::none)
    throw ConfigError("experiment.schemes: IFBF-family schemes need a square channel (selection = none)");
  const bool has_cifbf = std::any_of(schemes.begin(), schemes.end(), is_cifbf);
  if (has_cifbf) {
    if (axis == Axis::r0) {
      for (double x : grid)
        if (!(x > 0.0)) throw ConfigError("experiment.grid: CIFBF needs R0 > 0");
    } else if (!(r0 > 0.0) || std::isinf(r0)) {
      throw ConfigError("channel.r0: CIFBF on an SNR axis needs a finite positive R0");
    }
  }
  if (axis == Axis::r0) {
    for (double x : grid)
      if (x < 0.0) throw ConfigError("experiment.grid: R0 must be nonnegative");
  }
}

namespace {

struct TrialResult {
  std::vector<double> rate;      // per scheme
  std::vector<char> deficient;   // per scheme
};

TrialResult run_trial(const ExperimentSpec& spec, double snr_lin_nominal, double point_r0,
                      std::uint64_t point_index, std::uint64_t trial_index) {
  Rng rng = Rng::for_stream(spec.seed, hash_u64(0x7472, point_index, trial_index));

  Eigen::MatrixXd h;
  double snr_eff = snr_lin_nominal;
  double factor = 1.0;
  if (spec.model == ChannelModel::soft_handoff) {
    const SoftHandoffParams params{spec.num_cells, spec.gamma};
    h = complex_to_real(soft_handoff_matrix(params, rng));
    snr_eff = 2.0 * snr_lin_nominal;  // per-real-dimension power convention
    factor = 2.0;
  } else {
    h = rayleigh_matrix(spec.num_users, spec.num_cells, rng);
  }
  const Eigen::Index rows = h.rows();
  const Eigen::Index slots = h.cols();

  const bool wants_peruser = std::any_of(spec.schemes.begin(), spec.schemes.end(), [](Scheme s) {
    return s == Scheme::RQCoF || s == Scheme::RCoF;
  });
  const bool wants_ifbf = std::any_of(spec.schemes.begin(), spec.schemes.end(), is_ifbf_family);

  // Per-user coefficients and effective variances, computed before (and
  // independently of) any user selection.
  Eigen::VectorXd sigma2(rows);
  FieldMatrix q_rows(rows, slots);
  bool selected_deficient = false;
  std::vector<Eigen::Index> chosen;
  if (wants_peruser) {
    const PrimeField field(spec.p);
    for (Eigen::Index k = 0; k < rows; ++k) {
      const Eigen::VectorXd row = h.row(k).transpose();
      const IntVector a = best_coeff_qcof(row, snr_eff, spec.p);
      sigma2(k) = effective_variance(row, a.cast<double>(), snr_eff);
      for (Eigen::Index j = 0; j < slots; ++j) q_rows(k, j) = field.natural_map(a(j));
    }

    if (spec.selection == SelectionMode::none) {
      chosen.resize(static_cast<std::size_t>(rows));
      std::iota(chosen.begin(), chosen.end(), 0);
    } else if (spec.selection == SelectionMode::random) {
      std::vector<Eigen::Index> perm(static_cast<std::size_t>(rows));
      std::iota(perm.begin(), perm.end(), 0);
      for (Eigen::Index j = 0; j < slots; ++j) {
        const auto pick = static_cast<std::size_t>(j) +
                          static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(rows - j)));
        std::swap(perm[static_cast<std::size_t>(j)], perm[pick]);
      }
      chosen.assign(perm.begin(), perm.begin() + slots);
      std::sort(chosen.begin(), chosen.end());
    } else {
      SelectionInstance inst{spec.p, slots, q_rows, sigma2};
      const SelectionResult sel = greedy_select(inst);
      if (sel.feasible) {
        chosen = sel.chosen;
      } else {
        selected_deficient = true;
      }
    }

    if (!selected_deficient) {
      const PrimeField check_field(spec.p);
      FieldMatrix sub(static_cast<Eigen::Index>(chosen.size()), slots);
      for (Eigen::Index i = 0; i < sub.rows(); ++i) sub.row(i) = q_rows.row(chosen[static_cast<std::size_t>(i)]);
      selected_deficient = rank(check_field, sub) < slots;
    }
  }

  IntegerCoeffMatrix ifbf;
  if (wants_ifbf) ifbf = ifbf_coeffs(h, spec.p);

  TrialResult out;
  out.rate.resize(spec.schemes.size(), 0.0);
  out.deficient.resize(spec.schemes.size(), 0);
  const double log2p = std::log2(static_cast<double>(spec.p));

  for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
    const Scheme s = spec.schemes[si];
    switch (s) {
      case Scheme::RCoF: {
        out.deficient[si] = selected_deficient ? 1 : 0;
        if (selected_deficient) break;
        double worst = 0.0;
        for (Eigen::Index k : chosen) worst = std::max(worst, sigma2(k));
        const double raw = 0.5 * std::log2(snr_eff / worst);
        out.rate[si] = std::min(point_r0, std::max(0.0, factor * raw));
        break;
      }
      case Scheme::RQCoF: {
        out.deficient[si] = selected_deficient ? 1 : 0;
        if (selected_deficient) break;
        const NestedLatticePair pair = NestedLatticePair::from_snr(snr_eff, spec.p);
        double worst_h = 0.0;
        for (Eigen::Index k : chosen)
          worst_h = std::max(worst_h, discrete_entropy(discrete_noise_pmf({sigma2(k), pair})));
        out.rate[si] = std::min(point_r0, std::max(0.0, factor * (log2p - worst_h)));
        break;
      }
      case Scheme::IFBF_RQCoF:
      case Scheme::IFBF_RCoF: {
        const RateReport rep = rate_ifbf(h, ifbf.a_rows, snr_eff, spec.p, s);
        out.rate[si] = factor * rep.symmetric_rate;
        break;
      }
      case Scheme::CIFBF_RQCoF:
      case Scheme::CIFBF_RCoF: {
        const RateReport rep = rate_cifbf(h, ifbf.a_rows, snr_eff, spec.p, point_r0 / factor, s);
        out.rate[si] = factor * rep.symmetric_rate;
        break;
      }
      default:
        break;
    }
  }
  return out;
}

}  // namespace

CurveSet run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  CurveSet out;
  out.spec = spec;

  const std::size_t n_schemes = spec.schemes.size();
  const std::size_t n_points = spec.grid.size();
  // rates[scheme][point][trial]
  std::vector<std::vector<std::vector<double>>> rates(
      n_schemes, std::vector<std::vector<double>>(n_points, std::vector<double>(spec.trials)));
  std::vector<std::vector<std::vector<char>>> deficient(
      n_schemes, std::vector<std::vector<char>>(n_points, std::vector<char>(spec.trials)));

  for (std::size_t pi = 0; pi < n_points; ++pi) {
    const double x = spec.grid[pi];
    const double point_r0 = spec.axis == ExperimentSpec::Axis::r0 ? x : spec.r0;
    const double snr_db = spec.axis == ExperimentSpec::Axis::snr ? x : spec.snr_db;
    const double snr_lin = std::pow(10.0, snr_db / 10.0);
    parallel_for(spec.trials, [&](long long t) {
      const TrialResult res = run_trial(spec, snr_lin, point_r0, pi, static_cast<std::uint64_t>(t));
      for (std::size_t si = 0; si < n_schemes; ++si) {
        rates[si][pi][static_cast<std::size_t>(t)] = res.rate[si];
        deficient[si][pi][static_cast<std::size_t>(t)] = res.deficient[si];
      }
    });
  }

  for (std::size_t si = 0; si < n_schemes; ++si) {
    for (std::size_t pi = 0; pi < n_points; ++pi) {
      const auto& samples = rates[si][pi];
      const double n = static_cast<double>(samples.size());
      const double mean = kahan_sum(samples) / n;
      double std_error = 0.0;
      if (samples.size() > 1) {
        std::vector<double> sq(samples.size());
        for (std::size_t t = 0; t < samples.size(); ++t) {
          const double d = samples[t] - mean;
          sq[t] = d * d;
        }
        std_error = std::sqrt(kahan_sum(sq) / (n - 1.0) / n);
      }
      double bad = 0.0;
      for (char d : deficient[si][pi]) bad += d;
      out.points.push_back(CurvePoint{spec.schemes[si], spec.grid[pi], mean, std_error, bad / n});
    }
  }
  return out;
}

void emit_csv(const CurveSet& curves, std::ostream& os) {
  os << "# dascof sweep\n";
  os << "# build: " << build_id() << "\n";
  ExperimentSpec manifest_spec = curves.spec;
  manifest_spec.out_path.clear();  // the file knows where it lives
  std::istringstream manifest(render_config(manifest_spec));
  for (std::string line; std::getline(manifest, line);) os << "# " << line << "\n";
  os << "scheme,x,mean_rate,stderr,rank_deficiency_fraction,trials,seed\n";
  for (const CurvePoint& pt : curves.points) {
    os << scheme_name(pt.scheme) << ',' << format_double(pt.x) << ',' << format_double(pt.mean_rate)
       << ',' << format_double(pt.std_error) << ',' << format_double(pt.rank_deficiency_fraction)
       << ',' << curves.spec.trials << ',' << curves.spec.seed << "\n";
  }
  for (const OverlayRow& row : curves.overlays) {
    os << row.label << ',' << format_double(row.x) << ',' << format_double(row.y) << ",0,0,0,"
       << curves.spec.seed << "\n";
  }
}

void emit_csv(const CurveSet& curves, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("emit_csv: cannot open '" + path + "' for writing");
  emit_csv(curves, file);
  file.flush();
  if (!file) throw IoError("emit_csv: write to '" + path + "' failed");
}

std::vector<OverlayRow> read_overlay_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("read_overlay_csv: cannot open '" + path + "'");
  std::vector<OverlayRow> rows;
  std::string line;
  while (std::getline(file, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string label, xs, ys;
    if (!std::getline(ls, label, ',') || !std::getline(ls, xs, ',') || !std::getline(ls, ys, ','))
      continue;
    if (label == "scheme" || label == "label") continue;  // header row
    try {
      rows.push_back(OverlayRow{label, std::stod(xs), std::stod(ys)});
    } catch (const std::exception&) {
      throw IoError("read_overlay_csv: malformed row '" + line + "'");
    }
  }
  return rows;
}

}  // namespace dascof
