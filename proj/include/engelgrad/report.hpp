#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "engelgrad/flow.hpp"
#include "engelgrad/genericity.hpp"

namespace engelgrad {

inline constexpr const char* kSchemaVersion = "1.0.0";

using Json = nlohmann::ordered_json;

Json to_json(const Point4& x);
Json to_json(const Box& box);
Json to_json(const GammaComponent& c);
Json to_json(const RootSet& r);
Json to_json(const CertificateReport& r);
Json to_json(const LojaEstimate& e);
Json to_json(const TrajectorySummary& s);
Json to_json(const FlowBatch& b);
Json to_json(const PerturbationParams& p);
Json to_json(const RepairResult& r);

/// Top-level report object: schema_version, polynomial (canonical text), box.
Json report_header(const Poly4& f, const Box& box);

/// CSV with header t,x1,x2,x3,x4,f,grad_norm,dist_vf,lg_cum,ldelta_cum.
std::string trajectory_csv(const Trajectory& traj);

/// Shortest round-trip decimal text for a double ("nan", "inf", "-inf" for non-finite values).
std::string format_double(double v);

}  // namespace engelgrad
