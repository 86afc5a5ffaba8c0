#pragma once

#include <json.hpp>
#include <string>

#include "adeq/bounds.hpp"

namespace adeq {

/// Stable JSON form of a certificate. An infinite delta is encoded as null.
/// The meta object carries the full run configuration plus diagnostics so a
/// certificate alone reproduces its run.
nlohmann::ordered_json certificate_to_json(const Certificate& cert,
                                           nlohmann::ordered_json meta);

/// Inverse of certificate_to_json; meta_out (optional) receives the meta
/// object. Re-serializing the result yields the identical document.
Certificate certificate_from_json(const nlohmann::ordered_json& doc,
                                  nlohmann::ordered_json* meta_out = nullptr);

std::string render_certificate(const Certificate& cert);

}  // namespace adeq
