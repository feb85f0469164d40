#include "stimrun/assets.hpp"

#include <fstream>
#include <iterator>

#include "stimrun/error.hpp"
#include "stimrun/text.hpp"

namespace stimrun {

std::string_view asset_kind_name(AssetKind kind) {
    switch (kind) {
    case AssetKind::Audio: return "audio";
    case AssetKind::Image: return "image";
    case AssetKind::Text: return "text";
    }
    return "unknown";
}

DirectoryAssetSource::DirectoryAssetSource(std::filesystem::path base)
    : base_(std::move(base)) {
}

std::vector<std::uint8_t> DirectoryAssetSource::read(std::string_view name) {
    const auto path = base_ / std::filesystem::u8path(std::string(name));
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::AssetMissing, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void MemoryAssetSource::add(std::string name, std::vector<std::uint8_t> bytes) {
    files_[std::move(name)] = std::move(bytes);
}

std::vector<std::uint8_t> MemoryAssetSource::read(std::string_view name) {
    ++reads_;
    auto it = files_.find(name);
    if (it == files_.end()) {
        throw Error(ErrorCode::AssetMissing, "no asset named " + std::string(name));
    }
    return it->second;
}

StimulusHandle preload(AssetSource& source, std::string_view name, AssetKind kind, AssetId id) {
    auto stim = std::make_shared<Stimulus>();
    stim->id = id;
    stim->name = std::string(name);
    stim->kind = kind;
    stim->bytes = source.read(name);
    try {
        switch (kind) {
        case AssetKind::Audio:
            stim->audio = decode_wave(stim->bytes);
            break;
        case AssetKind::Image:
            stim->image = decode_image(stim->bytes);
            break;
        case AssetKind::Text:
            stim->text = decode_text(std::string_view(reinterpret_cast<const char*>(stim->bytes.data()), stim->bytes.size()));
            break;
        }
    } catch (const Error& e) {
        throw Error(e.code(), std::string(name) + ": " + e.what());
    }
    return stim;
}

StimulusHandle AssetCache::load(AssetSource& source, std::string_view name, AssetKind kind) {
    auto key = std::make_pair(std::string(name), kind);
    if (auto it = by_name_.find(key); it != by_name_.end()) {
        return it->second;
    }
    if (sealed_) {
        throw Error(ErrorCode::AssetMissing, std::string(name) + " was not preloaded before the session started");
    }
    auto handle = preload(source, name, kind, AssetId{static_cast<std::uint32_t>(ordered_.size() + 1)});
    by_name_.emplace(std::move(key), handle);
    ordered_.push_back(handle);
    return handle;
}

StimulusHandle AssetCache::find(std::string_view name, AssetKind kind) const {
    auto it = by_name_.find(std::make_pair(std::string(name), kind));
    if (it == by_name_.end()) {
        throw Error(ErrorCode::AssetMissing, std::string(asset_kind_name(kind)) + " asset " + std::string(name)
                + " is not preloaded");
    }
    return it->second;
}

StimulusHandle AssetCache::find(AssetId id) const {
    if (id.value == 0 || id.value > ordered_.size()) {
        throw Error(ErrorCode::AssetMissing, "unknown asset id " + std::to_string(id.value));
    }
    return ordered_[id.value - 1];
}

} // namespace stimrun
