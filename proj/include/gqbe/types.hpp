#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gqbe {

// Dense integer handle, tagged so entity/label/edge ids do not mix.
template <typename Tag>
struct Id {
  std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}

  constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
  constexpr auto operator<=>(const Id&) const = default;
};

using EntityId = Id<struct EntityTag>;
using LabelId = Id<struct LabelTag>;
using EdgeId = Id<struct EdgeTag>;

struct Triple {
  EntityId subj;
  LabelId label;
  EntityId obj;

  auto operator<=>(const Triple&) const = default;
};

// Ordered list of entities; query and answer tuples share this shape.
using Tuple = std::vector<EntityId>;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto e : t) {
      h ^= e.value;
      h *= 1099511628211ull;
    }
    return h;
  }
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or empty triple input.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A name, label or edge that does not exist in the data graph.
class NotFoundError : public Error {
 public:
  explicit NotFoundError(std::string name)
      : Error("not found: " + name), names_{std::move(name)} {}
  explicit NotFoundError(std::vector<std::string> names)
      : Error(join(names)), names_(std::move(names)) {}
  const std::vector<std::string>& names() const { return names_; }

 private:
  static std::string join(const std::vector<std::string>& names) {
    std::string s = "unknown entities:";
    for (const auto& n : names) s += " '" + n + "'";
    return s;
  }
  std::vector<std::string> names_;
};

// Query entities cannot be connected within the path length threshold.
class DisconnectedTupleError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Materialized intermediate results exceeded the configured row cap.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace gqbe

template <typename Tag>
struct std::hash<gqbe::Id<Tag>> {
  std::size_t operator()(const gqbe::Id<Tag>& id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
