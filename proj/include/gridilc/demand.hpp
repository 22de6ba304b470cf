#ifndef GRIDILC_DEMAND_HPP
#define GRIDILC_DEMAND_HPP

#include "gridilc/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gridilc {

/// Net power demand P^d(t) = P^p(t) + P^f(t) per node, piecewise linear
/// between equally spaced samples. Immutable once built.
class DemandTrace {
public:
  DemandTrace() = default;
  DemandTrace(double sample_step, Mat periodic, Mat fluctuating);

  int n_nodes() const { return static_cast<int>(periodic_.cols()); }
  double sample_step() const { return step_; }
  /// Last instant covered by the trace.
  double horizon() const { return step_ * double(periodic_.rows() - 1); }

  Vec operator()(double t) const { return periodic(t) + fluctuating(t); }
  Vec periodic(double t) const { return interpolate(periodic_, t); }
  Vec fluctuating(double t) const { return interpolate(fluctuating_, t); }

  /// Sample instants strictly inside (t0, t1).
  std::vector<double> breakpoints(double t0, double t1) const;
  /// Exact mean of the interpolant over [t0, t1].
  Vec mean(double t0, double t1) const;

private:
  Vec interpolate(const Mat& samples, double t) const;

  double step_ = 1.0;
  Mat periodic_;     // samples x nodes
  Mat fluctuating_;  // samples x nodes
};

enum class FluctuationKind {
  kGaussian,  // G_j * eta, eta ~ N(0, 1)
  kUniform,   // G_j * xi, xi ~ U(0, 1)
};

/// Amplitude multipliers that take effect at the start of `day`.
struct StepChange {
  int day = 0;
  Vec multipliers;
};

struct SyntheticDemandSpec {
  Vec amplitudes;   // H_j [W/W]
  Vec fluctuation;  // G_j [W/W]
  double period = 86400.0;
  std::uint64_t rng_seed = 1;
  std::vector<StepChange> step_schedule;
  FluctuationKind kind = FluctuationKind::kGaussian;
  // Draw one fluctuation per (node, hour of day) and repeat it every cycle
  // instead of drawing afresh every hour.
  bool repeat_daily = false;
};

void validate(const SyntheticDemandSpec& spec);

/// Amplitude multipliers in force on `day` (ones before the first step).
Vec step_multipliers(const SyntheticDemandSpec& spec, int day);

/// H_j sin^2(pi t / T_d), scaled by the step multiplier of the current day.
Vec synthetic_periodic(const SyntheticDemandSpec& spec, double t);

/// Hourly updates P^p + P^f at t = k T_d / 24, linearly interpolated.
DemandTrace synthetic_trace(const SyntheticDemandSpec& spec, int horizon_days);

enum class DayType { kWeekday = 0, kSaturday = 1, kSunday = 2 };
enum class ProfileKind { kH0, kG1, kG4, kMixed };

inline constexpr int kMinutesPerDay = 1440;

/// Minute-resolution profile, one column per day type, values in watts.
struct ProfileTable {
  std::string name;
  std::array<std::vector<double>, 3> minutes;

  double value(DayType day, int minute) const { return minutes[static_cast<int>(day)].at(minute); }
  double peak() const;
};

/// Reads `minute,weekday,saturday,sunday` CSV with 1440 rows.
ProfileTable load_profile_table(const std::filesystem::path& path);

/// Loads H0.csv, G1.csv and G4.csv from `dir`.
std::vector<ProfileTable> load_standard_profiles(const std::filesystem::path& dir);

ProfileKind parse_profile_kind(const std::string& s);
std::string to_string(ProfileKind k);

/// Calendar of `days` days starting on `first` (0 = Monday .. 6 = Sunday).
std::vector<DayType> weekly_calendar(int days, int first = 0);

struct LoadProfileSpec {
  std::vector<ProfileKind> node_profiles;
  std::vector<ProfileTable> tables;  // H0, G1, G4 by name
  double norm_power = 100.0;         // [W], maps to 1 per unit
  double noise_fraction = 0.1;       // minute-wise U(-f, f) relative noise
  std::vector<DayType> calendar;
  double period = 86400.0;
  std::uint64_t rng_seed = 1;
};

void validate(const LoadProfileSpec& spec);

/// Normalized profile value (peak -> 1) for one node without noise.
double profile_base(const LoadProfileSpec& spec, ProfileKind kind, DayType day, int minute);

DemandTrace load_profile_trace(const LoadProfileSpec& spec, int horizon_days);

}  // namespace gridilc

#endif  // GRIDILC_DEMAND_HPP
