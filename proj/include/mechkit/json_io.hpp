#pragma once

#include <string>

#include <json.hpp>

#include "mechkit/curve.hpp"
#include "mechkit/discontinuity.hpp"
#include "mechkit/ic_check.hpp"
#include "mechkit/mechanism.hpp"
#include "mechkit/multidim.hpp"
#include "mechkit/payment.hpp"

namespace mechkit {

// JSON interchange for curves, payments, mechanisms, discontinuity sets and
// reports. Rationals are written as {"num": n, "den": d}; parsers also
// accept bare integers and "p/q" / decimal strings.

nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

nlohmann::json curve_to_json(const AllocationCurve& c);
AllocationCurve curve_from_json(const nlohmann::json& j);

nlohmann::json payment_to_json(const PaymentCurve& g);
// "myerson" payloads are constructed through the checked factory and throw
// NotMonotoneError for a non-monotone base curve.
PaymentCurve payment_from_json(const nlohmann::json& j);

nlohmann::json set_to_json(const DiscontinuitySet& s);
DiscontinuitySet set_from_json(const nlohmann::json& j);

nlohmann::json mechanism_to_json(const Mechanism& m);
Mechanism mechanism_from_json(const nlohmann::json& j);

nlohmann::json vector_allocation_to_json(const VectorAllocation& f);
VectorAllocation vector_allocation_from_json(const nlohmann::json& j);

// ---- reports ------------------------------------------------------------------

nlohmann::json report_to_json(const ViolationReport& r);
nlohmann::json report_to_json(const NecessityReport& r);
nlohmann::json report_to_json(const RevenueReport& r);
nlohmann::json report_to_json(const DerivativeReport& r);
nlohmann::json report_to_json(const TruthfulnessReport& r);
nlohmann::json report_to_json(const NdViolationReport& r);
nlohmann::json outcome_to_json(const Outcome& o);

// Flat witness table: header "x,y,lhs,rhs,slack", one row per witness.
std::string witnesses_csv(const ViolationReport& r);

}  // namespace mechkit
