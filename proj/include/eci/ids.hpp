#pragma once

#include <cstdint>
#include <functional>

namespace eci {

// Opaque sequential identifier. The tag keeps agent/file/item ids from
// mixing at compile time; values are assigned from per-run counters so
// exports order deterministically.
template <class Tag>
struct Id {
    std::uint64_t value = 0;

    friend constexpr auto operator<=>(Id, Id) = default;
};

using AgentId = Id<struct AgentIdTag>;
using FileId = Id<struct FileIdTag>;
using ItemId = Id<struct ItemIdTag>;

}  // namespace eci

template <class Tag>
struct std::hash<eci::Id<Tag>> {
    std::size_t operator()(const eci::Id<Tag>& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
