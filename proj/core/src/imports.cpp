#include <filesystem>
#include <fstream>
#include <sstream>

#include "graphmac/error.hpp"
#include "policy_internal.hpp"

namespace graphmac {

namespace fs = std::filesystem;

namespace {

std::string resolve_path(const std::string& importer, const std::string& path) {
  const fs::path p(path);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (fs::path(importer).parent_path() / p).lexically_normal().string();
}

class Resolver {
 public:
  Resolver(const ImportLoader& loader, std::string root) : chain_{std::move(root)}, loader_(loader) {}

  void profile(PolicyProfile& p, const std::string& source) {
    std::vector<std::string> imports = std::move(p.imports);
    p.imports.clear();
    for (auto& child : p.children) profile(child, source);
    for (const auto& path : imports) {
      detail::PolicyFragment fragment = load(resolve_path(source, path));
      splice(p, std::move(fragment));
    }
  }

 private:
  detail::PolicyFragment load(const std::string& path) {
    for (const auto& seen : chain_) {
      if (seen == path) {
        std::string listing;
        for (const auto& c : chain_) listing += c + " -> ";
        listing += path;
        std::vector<Diagnostic> diags;
        for (const auto& c : chain_) diags.push_back(Diagnostic{c, 0, 0, "imports"});
        diags.push_back(Diagnostic{path, 0, 0, "repeats along the import chain"});
        throw Error(ErrorCode::import_cycle, "import cycle: " + listing, std::move(diags));
      }
    }
    const std::string bytes = loader_(path);
    detail::PolicyFragment fragment = detail::parse_fragment(bytes, path);

    chain_.push_back(path);
    for (auto& child : fragment.profiles) profile(child, path);
    std::vector<std::string> nested = std::move(fragment.imports);
    fragment.imports.clear();
    for (const auto& inner : nested) {
      detail::PolicyFragment sub = load(resolve_path(path, inner));
      fragment.rules.insert(fragment.rules.end(), std::make_move_iterator(sub.rules.begin()),
                            std::make_move_iterator(sub.rules.end()));
      fragment.profiles.insert(fragment.profiles.end(), std::make_move_iterator(sub.profiles.begin()),
                               std::make_move_iterator(sub.profiles.end()));
    }
    chain_.pop_back();
    return fragment;
  }

  static void splice(PolicyProfile& p, detail::PolicyFragment fragment) {
    p.rules.insert(p.rules.end(), std::make_move_iterator(fragment.rules.begin()),
                   std::make_move_iterator(fragment.rules.end()));
    for (auto& child : fragment.profiles) {
      bool duplicate = false;
      for (const auto& existing : p.children) {
        if (existing.name != child.name) continue;
        if (existing == child) {
          duplicate = true;
          break;
        }
        throw Error(ErrorCode::schema_violation, "import introduces a second sibling profile named '" + child.name +
                                                     "' under '" + p.name + "' with different content");
      }
      if (!duplicate) p.children.push_back(std::move(child));
    }
  }

  std::vector<std::string> chain_;
  const ImportLoader& loader_;
};

}  // namespace

ImportLoader filesystem_loader() {
  return [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::import_not_found, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
}

PolicyTree resolve_imports(const PolicyTree& tree, const ImportLoader& loader) {
  PolicyTree out = tree;
  const std::string root =
      tree.source_path.empty() ? std::string("<policy>") : fs::path(tree.source_path).lexically_normal().string();
  Resolver resolver(loader, root);
  for (auto& p : out.profiles) resolver.profile(p, root);
  return out;
}

PolicyTree load_policy_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot read policy file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  return resolve_imports(parse_policy(bytes, path), filesystem_loader());
}

}  // namespace graphmac
