// Command-line front end. Every command is a request to the same route table
// the HTTP server uses.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "classalg/document.hpp"
#include "classalg/http.hpp"
#include "classalg/service.hpp"

using namespace classalg;

namespace {

std::string scalar(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

bool flat(const Json& arr) {
  for (const auto& x : arr)
    if (x.is_object() || (x.is_array() && !flat(x))) return false;
  return true;
}

std::string inline_list(const Json& arr) {
  std::string out;
  for (const auto& x : arr) {
    if (!out.empty()) out += x.is_array() ? "; " : ", ";
    out += x.is_array() ? inline_list(x) : scalar(x);
  }
  return out.empty() ? "-" : out;
}

void table(const Json& j, std::ostream& out, const std::string& indent = "") {
  for (const auto& [key, v] : j.items()) {
    if (v.is_object()) {
      out << indent << key << ":\n";
      table(v, out, indent + "  ");
    } else if (v.is_array() && !flat(v)) {
      out << indent << key << ":\n";
      // Rows of objects share the first row's columns.
      std::vector<std::string> cols;
      for (const auto& [k, x] : v.front().items()) cols.push_back(k);
      out << indent << "  ";
      for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "\t" : "") << cols[i];
      out << "\n";
      for (const auto& row : v) {
        out << indent << "  ";
        for (std::size_t i = 0; i < cols.size(); ++i) {
          const Json& cell = row.contains(cols[i]) ? row[cols[i]] : Json(nullptr);
          out << (i ? "\t" : "")
              << (cell.is_array() ? inline_list(cell) : cell.is_object() ? cell.dump() : scalar(cell));
        }
        out << "\n";
      }
    } else {
      out << indent << key << ": " << (v.is_array() ? inline_list(v) : scalar(v)) << "\n";
    }
  }
}

struct Cli {
  std::string db;
  std::string format = "table";
};

Store open_store(const Cli& cli) {
  if (cli.db.empty() || !std::filesystem::exists(cli.db)) return Store();
  return load_file(cli.db);
}

int emit(const Cli& cli, const Response& res, const char* plain_key = nullptr) {
  if (res.status >= 400) {
    std::cerr << "error: " << scalar(res.body.value("code", Json("Error"))) << ": "
              << scalar(res.body.value("message", Json(""))) << "\n";
    return 1;
  }
  if (cli.format == "json") {
    std::cout << res.body.dump(2) << "\n";
  } else if (plain_key && res.body.contains(plain_key)) {
    std::cout << scalar(res.body[plain_key]) << "\n";
  } else {
    table(res.body, std::cout);
  }
  return 0;
}

Response call(Service& svc, const std::string& method, const std::string& path, const Json& body = nullptr,
              std::map<std::string, std::string> query = {}) {
  Request r;
  r.method = method;
  r.path = path;
  r.query = std::move(query);
  if (!body.is_null()) r.body = body.dump();
  return svc.handle(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class-algebra ontology engine"};
  app.require_subcommand(1);
  Cli cli;
  app.add_option("--db", cli.db, "Ontology document (created on first write)");
  app.add_option("--format", cli.format, "Output format")->check(CLI::IsMember({"json", "table"}));

  std::string text, name, attr, out_path, host = "127.0.0.1";
  std::vector<std::string> texts;
  std::vector<OidId> oids;
  int port = 8080;

  auto* load = app.add_subcommand("load", "Check a document and print its contents summary");
  load->add_option("file", text, "Document path")->required();
  auto* save = app.add_subcommand("save", "Write the --db store as a canonical document");
  save->add_option("file", out_path, "Output path")->required();
  auto* normalize = app.add_subcommand("normalize", "Print the normal form of an expression");
  normalize->add_option("expression", text)->required();
  auto* query = app.add_subcommand("query", "Extent, probability and belief interval of an expression");
  query->add_option("expression", text)->required();
  auto* describe = app.add_subcommand("describe", "Describe a set of objects");
  describe->add_option("oids", oids)->required();
  auto* implications = app.add_subcommand("implications", "Implication and equivalence report");
  auto* hierarchy = app.add_subcommand("hierarchy", "ISA hierarchy of the stored classes");
  auto* suggest = app.add_subcommand("suggest-rules", "Rules that hold on the data");
  auto* summarize = app.add_subcommand("summarize", "Group objects by an attribute");
  summarize->add_option("attr", attr)->required();
  auto* constrain = app.add_subcommand("constrain", "Validate and apply probability constraints");
  constrain->add_option("constraints", texts)->required();
  auto* validate = app.add_subcommand("validate", "Validate probability constraints without applying them");
  validate->add_option("constraints", texts)->required();
  auto* define = app.add_subcommand("define-class", "Define or redefine a named class");
  define->add_option("name", name)->required();
  define->add_option("expression", text)->required();
  auto* create = app.add_subcommand("create-object", "Add an object from a JSON attribute map");
  create->add_option("attributes", text)->required();
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Interface to bind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*load) {
      Store st = load_file(text);
      const StoreState& s = st.state();
      Json out{{"objects", s.objects.size()},
               {"virtualObjects", s.ledger.total()},
               {"relations", s.relations.size()},
               {"classes", s.classes.size()},
               {"constraints", s.constraints.size()}};
      return emit(cli, {200, out});
    }

    bool writes = *constrain || *define || *create;
    Service svc(open_store(cli), writes && !cli.db.empty() ? std::optional<std::string>(cli.db) : std::nullopt);

    if (*save) {
      save_file(*svc.snapshot(), out_path);
      return 0;
    }
    if (*normalize) return emit(cli, call(svc, "POST", "/normalize", {{"expression", text}}), "sdnf");
    if (*query) return emit(cli, call(svc, "POST", "/query", {{"expression", text}}));
    if (*describe) return emit(cli, call(svc, "POST", "/describe", {{"oids", oids}}));
    if (*implications) return emit(cli, call(svc, "GET", "/report/implications"));
    if (*hierarchy) return emit(cli, call(svc, "GET", "/hierarchy"));
    if (*suggest) return emit(cli, call(svc, "GET", "/suggest-rules"));
    if (*summarize) return emit(cli, call(svc, "GET", "/summarize", nullptr, {{"attr", attr}}));
    if (*validate) {
      Response res = call(svc, "POST", "/constraints", {{"constraints", texts}});
      int code = emit(cli, res);
      return code != 0 ? code : res.body.value("ok", false) ? 0 : 1;
    }
    if (*constrain) return emit(cli, call(svc, "POST", "/constraints/apply", {{"constraints", texts}}));
    if (*define) return emit(cli, call(svc, "POST", "/classes", {{"name", name}, {"expression", text}}));
    if (*create) {
      Json attrs;
      try {
        attrs = Json::parse(text);
      } catch (const Json::parse_error& e) {
        std::cerr << "error: ParseError: " << e.what() << "\n";
        return 1;
      }
      return emit(cli, call(svc, "POST", "/objects", {{"attributes", attrs}}));
    }
    if (*serve) {
      Service live(open_store(cli), cli.db.empty() ? std::nullopt : std::optional<std::string>(cli.db));
      HttpServer server(live);
      int bound = server.bind(host, port);
      if (bound < 0) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      std::cout << "listening on " << host << ":" << bound << std::endl;
      return server.listen() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
  return 2;
}
