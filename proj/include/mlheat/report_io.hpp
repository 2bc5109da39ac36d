#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "mlheat/experiments.hpp"
#include "mlheat/mild_solver.hpp"
#include "mlheat/mixed_operator.hpp"
#include "mlheat/orlicz.hpp"

namespace mlheat {

using Json = nlohmann::ordered_json;

/// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);
/// JSON number, or the string form of a non-finite value.
Json json_number(double v);

/// Stem such as "d1_s0.5_m3_p2_q4.5" for artifact file names.
std::string artifact_stem(int d, double s, double m, double p, double q);

/// Run report without wall-clock data, so equal runs serialize identically.
Json to_json(const RunReport& rep);
/// Columns: t, one per recorded L^q norm, Linf, exp_Lp, boundary_mass_fraction.
void write_series_csv(std::ostream& os, const RunReport& rep);

Json to_json(const OrliczNorm& n);
Json to_json(const SigmaTable& tab);
void write_sigma_csv(std::ostream& os, const SigmaTable& tab);
Json to_json(const DecayFit& fit);
void write_decay_csv(std::ostream& os, const RunReport& rep, std::span<const DecayFit> fits, double s);
Json to_json(const KappaResult& k);
Json to_json(const FujitaTable& tab);
void write_fujita_csv(std::ostream& os, const FujitaTable& tab);
Json to_json(const SemigroupCampaign& c);
void write_semigroup_csv(std::ostream& os, const SemigroupCampaign& c);
Json to_json(const LqLrTable& tab);
void write_lq_lr_csv(std::ostream& os, const LqLrTable& tab);

/// Writes `content` to `path` in binary mode; throws std::runtime_error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace mlheat
