#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stimrun/image.hpp"
#include "stimrun/wave.hpp"

namespace stimrun {

enum class AssetKind { Audio, Image, Text };

std::string_view asset_kind_name(AssetKind kind);

struct AssetId {
    std::uint32_t value = 0;
    auto operator<=>(const AssetId&) const = default;
};

// A fully decoded stimulus held in memory. Triggering one never touches the
// file system.
struct Stimulus {
    AssetId id;
    std::string name; // path as written in the script
    AssetKind kind = AssetKind::Audio;
    std::vector<std::uint8_t> bytes; // original file contents
    std::optional<PcmAudio> audio;
    std::optional<RasterImage> image;
    std::string text; // decoded UTF-8 for Text assets
};

using StimulusHandle = std::shared_ptr<const Stimulus>;

// Where asset bytes come from. Implementations throw Error(AssetMissing).
class AssetSource {
public:
    virtual ~AssetSource() = default;
    virtual std::vector<std::uint8_t> read(std::string_view name) = 0;
};

// Resolves names relative to a base directory.
class DirectoryAssetSource final : public AssetSource {
public:
    explicit DirectoryAssetSource(std::filesystem::path base);
    std::vector<std::uint8_t> read(std::string_view name) override;

private:
    std::filesystem::path base_;
};

// In-memory source for tests and embedding; counts reads.
class MemoryAssetSource final : public AssetSource {
public:
    void add(std::string name, std::vector<std::uint8_t> bytes);
    std::vector<std::uint8_t> read(std::string_view name) override;
    int reads() const { return reads_; }

private:
    std::map<std::string, std::vector<std::uint8_t>, std::less<>> files_;
    int reads_ = 0;
};

/// Reads and decodes one asset. Throws Error(AssetMissing) or Error(Decode).
StimulusHandle preload(AssetSource& source, std::string_view name, AssetKind kind, AssetId id);

// Preloaded stimuli, keyed by (name, kind). Ids are assigned in load order
// starting at 1. Sealing forbids further loads.
class AssetCache {
public:
    StimulusHandle load(AssetSource& source, std::string_view name, AssetKind kind);

    /// Throws Error(AssetMissing) if the asset was not preloaded.
    StimulusHandle find(std::string_view name, AssetKind kind) const;
    StimulusHandle find(AssetId id) const;

    void seal() { sealed_ = true; }
    bool sealed() const { return sealed_; }

    const std::vector<StimulusHandle>& all() const { return ordered_; }

private:
    std::map<std::pair<std::string, AssetKind>, StimulusHandle, std::less<>> by_name_;
    std::vector<StimulusHandle> ordered_;
    bool sealed_ = false;
};

} // namespace stimrun
