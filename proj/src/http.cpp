#include "classalg/http.hpp"

#include "httplib.h"

namespace classalg {

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
};

namespace {

void dispatch(Service& service, const httplib::Request& req, httplib::Response& res) {
  Request r;
  r.method = req.method;
  r.path = req.path;
  for (const auto& [k, v] : req.params) r.query[k] = v;
  r.body = req.body;
  if (req.has_header("If-Match")) r.if_match = req.get_header_value("If-Match");
  Response out = service.handle(r);
  res.status = out.status;
  res.set_header("ETag", "\"" + std::to_string(service.revision()) + "\"");
  res.set_content(out.body.dump(), "application/json");
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(new Impl{service, {}}) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    dispatch(impl_->service, req, res);
  };
  const char* any = R"(/.*)";
  impl_->server.Get(any, handler);
  impl_->server.Post(any, handler);
  impl_->server.Patch(any, handler);
  impl_->server.Delete(any, handler);
  impl_->server.Put(any, handler);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace classalg
