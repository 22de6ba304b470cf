#include "gridilc/demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace gridilc {

DemandTrace::DemandTrace(double sample_step, Mat periodic, Mat fluctuating)
    : step_(sample_step), periodic_(std::move(periodic)), fluctuating_(std::move(fluctuating)) {
  if (!(step_ > 0)) throw ConfigError("demand trace: sample step must be positive");
  if (periodic_.rows() < 2 || periodic_.rows() != fluctuating_.rows() ||
      periodic_.cols() != fluctuating_.cols())
    throw ConfigError("demand trace: inconsistent sample matrices");
}

Vec DemandTrace::interpolate(const Mat& samples, double t) const {
  if (t < 0 || t > horizon() * (1 + 1e-12))
    throw ConfigError("demand trace evaluated outside its horizon at t = " + std::to_string(t));
  const double pos = t / step_;
  auto i = static_cast<Eigen::Index>(std::floor(pos));
  i = std::clamp<Eigen::Index>(i, 0, samples.rows() - 2);
  const double frac = pos - double(i);
  return (1 - frac) * samples.row(i).transpose() + frac * samples.row(i + 1).transpose();
}

std::vector<double> DemandTrace::breakpoints(double t0, double t1) const {
  std::vector<double> out;
  auto k = static_cast<long long>(std::floor(t0 / step_)) + 1;
  for (;; ++k) {
    const double t = double(k) * step_;
    if (t >= t1 - 1e-9 * step_) break;
    if (t > t0 + 1e-9 * step_) out.push_back(t);
  }
  return out;
}

Vec DemandTrace::mean(double t0, double t1) const {
  if (!(t1 > t0)) throw ConfigError("demand trace: empty averaging interval");
  Vec acc = Vec::Zero(n_nodes());
  double a = t0;
  std::vector<double> cuts = breakpoints(t0, t1);
  cuts.push_back(t1);
  for (double b : cuts) {
    acc += 0.5 * (b - a) * ((*this)(a) + (*this)(b));
    a = b;
  }
  return acc / (t1 - t0);
}

void validate(const SyntheticDemandSpec& spec) {
  const auto n = spec.amplitudes.size();
  if (n < 1) throw ConfigError("demand: amplitudes must not be empty");
  if (spec.fluctuation.size() != n) throw ConfigError("demand: fluctuation size must match amplitudes");
  if ((spec.amplitudes.array() < 0).any()) throw ConfigError("demand: amplitudes must be nonnegative");
  if ((spec.fluctuation.array() < 0).any()) throw ConfigError("demand: fluctuation must be nonnegative");
  if (!(spec.period > 0)) throw ConfigError("demand: period must be positive");
  for (const StepChange& s : spec.step_schedule) {
    if (s.multipliers.size() != n) throw ConfigError("demand: step multipliers size must match amplitudes");
    if (s.day < 0) throw ConfigError("demand: step day must be nonnegative");
  }
}

Vec step_multipliers(const SyntheticDemandSpec& spec, int day) {
  Vec m = Vec::Ones(spec.amplitudes.size());
  int latest = -1;
  for (const StepChange& s : spec.step_schedule) {
    if (s.day <= day && s.day >= latest) {
      m = s.multipliers;
      latest = s.day;
    }
  }
  return m;
}

Vec synthetic_periodic(const SyntheticDemandSpec& spec, double t) {
  const int day = static_cast<int>(std::floor(t / spec.period));
  const double s = std::sin(std::numbers::pi * t / spec.period);
  return spec.amplitudes.cwiseProduct(step_multipliers(spec, day)) * (s * s);
}

DemandTrace synthetic_trace(const SyntheticDemandSpec& spec, int horizon_days) {
  validate(spec);
  if (horizon_days < 1) throw ConfigError("demand: horizon must be at least one day");
  const Eigen::Index n = spec.amplitudes.size();
  const double step = spec.period / kHoursPerCycle;
  const Eigen::Index samples = Eigen::Index(horizon_days) * kHoursPerCycle + 1;

  std::mt19937_64 rng(spec.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw = [&]() { return spec.kind == FluctuationKind::kGaussian ? gauss(rng) : unif(rng); };

  Mat daily;
  if (spec.repeat_daily) {
    daily.resize(kHoursPerCycle, n);
    for (int h = 0; h < kHoursPerCycle; ++h)
      for (Eigen::Index j = 0; j < n; ++j) daily(h, j) = draw();
  }

  Mat periodic(samples, n), fluct(samples, n);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const double t = double(k) * step;
    periodic.row(k) = synthetic_periodic(spec, t).transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double xi = spec.repeat_daily ? daily(k % kHoursPerCycle, j) : draw();
      fluct(k, j) = spec.fluctuation[j] * xi;
    }
  }
  return DemandTrace(step, std::move(periodic), std::move(fluct));
}

double ProfileTable::peak() const {
  double p = 0;
  for (const auto& col : minutes)
    for (double v : col) p = std::max(p, v);
  return p;
}

ProfileTable load_profile_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("profile table not found: " + path.string());
  ProfileTable table;
  table.name = path.stem().string();
  std::string line;
  std::getline(in, line);
  if (line.rfind("minute,weekday,saturday,sunday", 0) != 0)
    throw ConfigError(path.string() + ": expected header minute,weekday,saturday,sunday");
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::array<double, 4> v{};
    for (int c = 0; c < 4; ++c) {
      if (!std::getline(ss, cell, ',')) throw ConfigError(path.string() + ": short row " + std::to_string(row + 2));
      v[c] = std::stod(cell);
    }
    if (static_cast<int>(v[0]) != row) throw ConfigError(path.string() + ": minute column out of sequence");
    for (int d = 0; d < 3; ++d) table.minutes[d].push_back(v[d + 1]);
    ++row;
  }
  if (row != kMinutesPerDay) throw ConfigError(path.string() + ": expected 1440 minute rows");
  return table;
}

std::vector<ProfileTable> load_standard_profiles(const std::filesystem::path& dir) {
  return {load_profile_table(dir / "H0.csv"), load_profile_table(dir / "G1.csv"),
          load_profile_table(dir / "G4.csv")};
}

ProfileKind parse_profile_kind(const std::string& s) {
  if (s == "H0") return ProfileKind::kH0;
  if (s == "G1") return ProfileKind::kG1;
  if (s == "G4") return ProfileKind::kG4;
  if (s == "mixed") return ProfileKind::kMixed;
  throw ConfigError("unknown load profile '" + s + "' (expected H0, G1, G4 or mixed)");
}

std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::kH0: return "H0";
    case ProfileKind::kG1: return "G1";
    case ProfileKind::kG4: return "G4";
    case ProfileKind::kMixed: return "mixed";
  }
  return "?";
}

std::vector<DayType> weekly_calendar(int days, int first) {
  std::vector<DayType> cal;
  for (int d = 0; d < days; ++d) {
    const int wd = (first + d) % 7;
    cal.push_back(wd == 5 ? DayType::kSaturday : wd == 6 ? DayType::kSunday : DayType::kWeekday);
  }
  return cal;
}

namespace {

const ProfileTable& find_table(const LoadProfileSpec& spec, const std::string& name) {
  for (const ProfileTable& t : spec.tables)
    if (t.name == name) return t;
  throw ConfigError("missing load profile table " + name);
}

}  // namespace

void validate(const LoadProfileSpec& spec) {
  if (spec.node_profiles.empty()) throw ConfigError("profiles: no node assignment");
  if (spec.noise_fraction < 0 || spec.noise_fraction > 0.1)
    throw ConfigError("profiles: noise fraction must lie in [0, 0.1]");
  if (!(spec.norm_power > 0)) throw ConfigError("profiles: norm power must be positive");
  if (!(spec.period > 0)) throw ConfigError("profiles: period must be positive");
  for (ProfileKind k : spec.node_profiles) {
    if (k == ProfileKind::kMixed) {
      for (const char* n : {"H0", "G1", "G4"}) find_table(spec, n);
    } else {
      find_table(spec, to_string(k));
    }
  }
}

double profile_base(const LoadProfileSpec& spec, ProfileKind kind, DayType day, int minute) {
  auto normalized = [&](const std::string& name) {
    const ProfileTable& t = find_table(spec, name);
    return t.value(day, minute) / t.peak();
  };
  if (kind == ProfileKind::kMixed) return (normalized("H0") + normalized("G1") + normalized("G4")) / 3.0;
  return normalized(to_string(kind));
}

DemandTrace load_profile_trace(const LoadProfileSpec& spec, int horizon_days) {
  validate(spec);
  if (horizon_days < 1) throw ConfigError("profiles: horizon must be at least one day");
  if (static_cast<int>(spec.calendar.size()) < horizon_days)
    throw ConfigError("profiles: calendar covers " + std::to_string(spec.calendar.size()) +
                      " days, horizon needs " + std::to_string(horizon_days));
  const Eigen::Index n = static_cast<Eigen::Index>(spec.node_profiles.size());
  const Eigen::Index samples = Eigen::Index(horizon_days) * kMinutesPerDay + 1;

  std::mt19937_64 rng(spec.rng_seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  Mat base(samples, n), noise(samples, n);
  for (Eigen::Index k = 0; k < samples; ++k) {
    auto day = static_cast<std::size_t>(k / kMinutesPerDay);
    int minute = static_cast<int>(k % kMinutesPerDay);
    // The closing sample continues into the next calendar day when known.
    if (day >= spec.calendar.size()) {
      day = spec.calendar.size() - 1;
      minute = kMinutesPerDay - 1;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = profile_base(spec, spec.node_profiles[j], spec.calendar[day], minute);
      base(k, j) = v;
      noise(k, j) = v * spec.noise_fraction * unif(rng);
    }
  }
  return DemandTrace(spec.period / kMinutesPerDay, std::move(base), std::move(noise));
}

}  // namespace gridilc
