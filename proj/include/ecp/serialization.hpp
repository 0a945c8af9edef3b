#pragma once

#include "json.hpp"

#include "ecp/analytics.hpp"
#include "ecp/cavity.hpp"
#include "ecp/hilbert.hpp"
#include "ecp/oracle.hpp"
#include "ecp/protocol.hpp"

namespace ecp {

using Json = nlohmann::json;

Json to_json(const hilbert::StateVector& s);
Json to_json(std::complex<double> z);
Json to_json(const cavity::ScatterCoefficients& sc);
Json to_json(const cavity::CavityParams& p);
Json to_json(const protocol::WCoefficients& c);
Json to_json(const protocol::ProtocolConfig& cfg);
Json to_json(const protocol::ProtocolTrace& trace);
Json to_json(const analytics::CurvePoint& p);
Json to_json(const std::vector<analytics::CurvePoint>& points);
Json to_json(const std::vector<oracle::ComparisonReport>& reports);

}  // namespace ecp
