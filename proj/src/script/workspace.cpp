#include "commlab/script/workspace.hpp"

namespace commlab::script {

const Value* Workspace::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &entries_[it->second].second;
}

Value* Workspace::find_mutable(std::string_view name) {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &entries_[it->second].second;
}

void Workspace::set(std::string name, Value value) {
    if (auto* slot = find_mutable(name)) {
        *slot = std::move(value);
        return;
    }
    index_.emplace(name, entries_.size());
    entries_.emplace_back(std::move(name), std::move(value));
}

bool Workspace::erase(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return false;
    const std::size_t pos = it->second;
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(pos));
    index_.erase(it);
    for (auto& [key, i] : index_)
        if (i > pos) --i;
    return true;
}

}  // namespace commlab::script
