#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "classalg/error.hpp"
#include "classalg/json_codec.hpp"
#include "classalg/model.hpp"

namespace classalg {

struct Request {
  std::string method;  // GET, POST, PATCH, DELETE
  std::string path;    // without query string
  std::map<std::string, std::string> query;
  std::string body;
  std::optional<std::string> if_match;  // expected revision for writes
};

struct Response {
  int status = 200;
  Json body;
};

// {"code", "message", "position"?}
Json error_json(const Error& e);

// Route table over one store. Writers are serialized; readers work on the
// snapshot current when they start. When a path is given, every successful
// mutation is saved to it.
class Service {
 public:
  explicit Service(Store store = Store(), std::optional<std::string> persist_path = std::nullopt);

  Response handle(const Request& r);

  Snapshot snapshot() const;
  std::uint64_t revision() const;

  static constexpr std::size_t kDefaultPageSize = 10000;

 private:
  Response read(const Request& r, const Snapshot& snap);
  Response write(const Request& r, Store& work);

  mutable std::shared_mutex mutex_;
  Store store_;
  std::optional<std::string> persist_path_;
};

}  // namespace classalg
