#pragma once

#include <memory>
#include <string>

#include "classalg/service.hpp"

namespace classalg {

// HTTP/1.1 front end for a Service. Request and response bodies are JSON;
// "If-Match: <revision>" guards writes.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Binds host:port; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace classalg
