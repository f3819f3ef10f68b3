#pragma once

#include <array>
#include <string>
#include <vector>

#include "bsq/basis.hpp"
#include "bsq/picard.hpp"

namespace bsq {

constexpr int kProbeCount = 10;

/// All norms at one instant. Column order of the CSV schema follows the
/// declaration order below; probes are (P(theta e2), w_j) for j = 1..10.
struct DiagnosticsRecord {
  double time = 0.0;
  double u_l2 = 0.0;
  double grad_u_l2 = 0.0;
  double au_l2 = 0.0;
  double ut_l2 = 0.0;
  double theta_l2 = 0.0;
  double theta_l3 = 0.0;
  double theta_l4 = 0.0;
  double grad_theta_l2 = 0.0;
  double grad_rho_l2 = 0.0;  // ||grad theta + e2||
  double rho_h1 = 0.0;       // torus: (||theta||^2 + ||grad rho||^2)^(1/2); channel: literal ||rho||_H1
  double stokes_residual_l2 = 0.0;  // ||A u - P(theta e2)||
  double grad_u_linf = 0.0;
  double d2u_l3 = 0.0;
  double energy_residual = 0.0;  // per-step residual of the energy identity ending at this record
  double u_l4 = 0.0;
  double u_linf = 0.0;
  double theta_t_l2 = 0.0;
  double utt_vprime = 0.0;  // max_j |(u_tt, w_j)| / sqrt(lambda_j), a lower bound of ||u_tt||_V'
  std::array<double, kProbeCount> probes{};
};

std::vector<std::string> diagnostics_columns();
std::vector<double> to_row(const DiagnosticsRecord& r);
DiagnosticsRecord from_row(const std::vector<double>& row);

/// Time derivatives of the state; xi_ddot may be empty.
struct StateRates {
  VelocityCoeffs xi_dot;
  ScalarField theta_dot;
  VelocityCoeffs xi_ddot;
};

/// Rates of the nonlinear system at a state: the velocity advects itself.
StateRates nonlinear_rates(const StokesBasis& basis, const BoussinesqState& state);

DiagnosticsRecord record(const StokesBasis& basis, const BoussinesqState& state, const StateRates& rates);

/// E = (||u||^2 + ||theta||^2) / 2.
double energy(const StokesBasis& basis, const BoussinesqState& state);

struct EnergyAudit {
  std::vector<double> times;       // left end of each step
  std::vector<double> raw;         // (E_{k+1} - E_k)/dt + (G_k^2 + G_{k+1}^2)/2, G = ||grad u||
  std::vector<double> normalized;  // raw / E(0) (raw when E(0) = 0)
  double max_abs_normalized = 0.0;
};

/// Rejects non-uniform grids.
EnergyAudit energy_balance_audit(const std::vector<double>& times, const std::vector<double>& energy,
                                 const std::vector<double>& grad_u);

/// Diagnostics of one converged window: records at samples whose global step
/// index step_offset + k is a multiple of `stride` (plus the first and last
/// samples on request) and per-step energy data.
struct WindowDiagnostics {
  std::vector<DiagnosticsRecord> records;
  std::vector<double> times, energy, grad_u;  // every sample
};
WindowDiagnostics diagnose_window(const StokesBasis& basis, const WindowSolution& solution, int stride,
                                  bool include_first, bool include_last, long long step_offset = 0);

struct AsymptoticThresholds {
  double tail_fraction = 0.25;
  double grad_decay_frac = 0.05;
  double residual_decay_frac = 0.10;
  double au_slope_max = 0.0;
  double rho_growth_max = 0.05;
  double probe_frac = 0.05;
  int min_tail_samples = 8;
  double log_floor = 1e-14;
};

struct AsymptoticVerdict {
  std::string name;
  std::string quantity;
  double tail_start = 0.0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool passed = false;
  bool inconclusive = false;
  std::vector<double> fitted;  // sup values or per-probe statistics
};

/// Verdicts (a)-(e) on a record series.
std::vector<AsymptoticVerdict> asymptotic_report(const std::vector<DiagnosticsRecord>& records,
                                                 const AsymptoticThresholds& thresholds = {});

/// Least-squares slope of log(max(v, floor)) against t.
double log_slope(const std::vector<double>& t, const std::vector<double>& v, double floor = 1e-14);

enum class DecayVariant { i, ii, iii };

struct LemmaVerdict {
  bool hypotheses_hold = false;
  bool conclusion_holds = false;
  double fitted_c = 0.0;
  std::vector<std::string> failures;
};

/// Samplewise check of the decay lemma's hypotheses and conclusion. g and h
/// are required for variants ii and iii respectively (g also for iii).
LemmaVerdict decay_lemma_check(const std::vector<double>& t, const std::vector<double>& f,
                               const std::vector<double>& g, const std::vector<double>& h, DecayVariant variant,
                               double tail_fraction = 0.25, double decay_frac = 0.05);

/// ||grad u||_inf / (||grad u|| + ||D^2 u||_L3).
double sobolev_ratio(const DiagnosticsRecord& r);
/// ||u||_L4 / (||u|| ||grad u||)^(1/2).
double ladyzhenskaya_ratio(const DiagnosticsRecord& r);

struct InequalityAudit {
  double sobolev_c = 0.0;
  double ladyzhenskaya_c = 0.0;
  double gronwall_c = 0.0;      // grad-u bound with forcing int ||theta||^2
  double growth_c = 0.0;        // density-gradient growth bound
  double theta_t_c = 0.0;       // density time-derivative bound
  double l3w23_integral = 0.0;  // int ||D^2 u||_L3^3 dt
  double utt_sup = 0.0;
};

/// Fitted constants over a record series (theta0 data taken from the first record).
InequalityAudit inequality_audit(const std::vector<DiagnosticsRecord>& records);

}  // namespace bsq
