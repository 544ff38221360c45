#include "xrreq/errors.hpp"

#include <utility>

namespace xrreq {
namespace {

std::string lookup_message(const std::string& key, const std::vector<std::string>& valid) {
  std::string msg = "unknown key '" + key + "'; valid keys:";
  for (const auto& k : valid) msg += "\n  " + k;
  return msg;
}

}  // namespace

LookupError::LookupError(const std::string& what_key, std::vector<std::string> valid_keys)
    : std::out_of_range(lookup_message(what_key, valid_keys)), valid_keys_(std::move(valid_keys)) {}

ParseError::ParseError(const std::string& message, std::string field, int line)
    : std::runtime_error(message), field_(std::move(field)), line_(line) {}

}  // namespace xrreq
