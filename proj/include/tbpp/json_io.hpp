#ifndef TBPP_JSON_IO_HPP
#define TBPP_JSON_IO_HPP

// Canonical JSON serialization of models and queries for tooling. Field names
// mirror the object model.

#include <string>

#include <json.hpp>

#include "tbpp/model.hpp"

namespace tbpp {

nlohmann::json model_to_json(const TbppModel& model);
TbppModel model_from_json(const nlohmann::json& j);

nlohmann::json query_to_json(const TbppModel& model, const Query& q);
Query query_from_json(const TbppModel& model, const nlohmann::json& j);

}  // namespace tbpp

#endif
