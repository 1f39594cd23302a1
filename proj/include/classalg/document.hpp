#pragma once

#include <string>
#include <string_view>

#include "classalg/model.hpp"

namespace classalg {

constexpr int kFormatVersion = 1;

// Canonical JSON: sorted keys, two-space indent, trailing newline. Saving a
// loaded canonical document reproduces it byte for byte.
std::string save_document(const StoreState& s);

// Throws ParseError, VersionMismatch or IntegrityError.
Store load_document(std::string_view text);

Store load_file(const std::string& path);
void save_file(const StoreState& s, const std::string& path);

}  // namespace classalg
