#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "classalg/normalize.hpp"
#include "classalg/sdnf.hpp"
#include "classalg/syntax.hpp"
#include "classalg/value.hpp"

namespace classalg {

using OidId = std::uint64_t;

enum class OidKind { real, virtual_ };

struct Oid {
  OidId id = 0;
  OidKind kind = OidKind::real;

  friend bool operator==(const Oid& a, const Oid& b) { return a.id == b.id; }
  friend bool operator<(const Oid& a, const Oid& b) { return a.id < b.id; }
};

using Attributes = std::map<std::string, std::vector<Value>>;

struct ExplicitRelation {
  std::set<std::pair<OidId, OidId>> edges;
  std::map<OidId, std::set<OidId>> forward, backward;
};

// The full cross product of two class extents, computed on demand.
struct ClassRelation {
  ClassPtr domain, range;
};

struct CompositeRelation {
  Path path;
};

struct RelationDef {
  std::string name;
  std::variant<ExplicitRelation, ClassRelation, CompositeRelation> body;

  bool is_explicit() const { return std::holds_alternative<ExplicitRelation>(body); }
};

RelationDef make_class_relation(std::string name, ClassPtr domain, ClassPtr range);
RelationDef make_composite_relation(std::string name, Path path);

struct ClassDef {
  std::string name;
  Sdnf intent;
  std::string text;  // as the user wrote it
};

struct Movement {
  OidId oid = 0;
  std::string from;  // empty for a fresh allocation
  std::string to;
};

struct VirtualLedger {
  std::map<OidId, Sdnf> allocations;  // virtual oid -> home node
  std::vector<Movement> movements;

  std::map<std::string, std::size_t> per_node() const;
  std::size_t total() const { return allocations.size(); }
};

struct StoreState {
  OidId next_id = 1;
  std::uint64_t revision = 0;
  std::map<OidId, Attributes> objects;
  std::map<std::string, RelationDef> relations;
  std::map<std::string, ClassDef> classes;
  std::vector<std::string> constraints;
  VirtualLedger ledger;

  bool is_real(OidId id) const { return objects.count(id) != 0; }
  bool is_virtual(OidId id) const { return ledger.allocations.count(id) != 0; }
  bool exists(OidId id) const { return is_real(id) || is_virtual(id); }
  // Real and virtual oids, ascending.
  std::vector<Oid> all_oids() const;
  const ClassDef* find_class(const std::string& name) const;
  ClassResolver resolver() const;
  NormalizeContext context(std::optional<std::string> defining = std::nullopt) const;
};

using Snapshot = std::shared_ptr<const StoreState>;

// Copy-on-write store. Outstanding snapshots keep the state they were taken
// from; the next mutation copies. Not internally synchronized: callers
// serialize writers.
class Store {
 public:
  Store();
  explicit Store(StoreState state);  // validates integrity

  Snapshot snapshot() const { return state_; }
  const StoreState& state() const { return *state_; }
  std::uint64_t revision() const { return state_->revision; }

  OidId create_object(Attributes attributes);
  void delete_object(OidId id);
  void set_attribute(OidId id, const std::string& attr, std::vector<Value> values);
  void remove_attribute(OidId id, const std::string& attr);

  void add_edge(const std::string& relation, OidId source, OidId target);
  void remove_edge(const std::string& relation, OidId source, OidId target);
  void define_relation(RelationDef def);

  const ClassDef& define_class(const std::string& name, const std::string& text);
  void remove_class(const std::string& name);

  OidId add_virtual(const Sdnf& home);
  void move_virtual(OidId id, const Sdnf& to);

  void set_constraints(std::vector<std::string> texts);

  NormalizeOptions normalize_options;

 private:
  StoreState& mutate();

  std::shared_ptr<StoreState> state_;
};

// Throws IntegrityError when an edge or allocation is dangling, a composite
// is cyclic or refers to an unknown relation, or oids collide.
void check_integrity(const StoreState& s);

void check_identifier(const std::string& name, const char* what);

}  // namespace classalg
