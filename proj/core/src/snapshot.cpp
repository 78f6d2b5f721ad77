#include "spatcode/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace spatcode {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'S', 'C'};
constexpr std::uint32_t kVersion = 1;

enum SectionId : std::uint32_t {
    kSectionSchema = 1,
    kSectionEngineConfig = 2,
    kSectionWindowState = 3,
    kSectionRecords = 4,
    kSectionChecksum = 0xFFFFFFFF,
};

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

class ByteWriter {
public:
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void i64(std::int64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void bytes(const void* data, std::size_t n) { raw(data, n); }

    const std::string& buffer() const { return buffer_; }

private:
    void raw(const void* data, std::size_t n) {
        buffer_.append(static_cast<const char*>(data), n);
    }
    std::string buffer_;
};

class ByteReader {
public:
    explicit ByteReader(std::string bytes) : bytes_(std::move(bytes)) {}

    std::uint32_t u32() { return read<std::uint32_t>(); }
    std::uint64_t u64() { return read<std::uint64_t>(); }
    std::int64_t i64() { return read<std::int64_t>(); }
    double f64() { return read<double>(); }

    void expect_magic() {
        if (remaining() < sizeof kMagic ||
            std::memcmp(bytes_.data() + pos_, kMagic, sizeof kMagic) != 0) {
            throw SnapshotError("not a snapshot file (bad magic)");
        }
        pos_ += sizeof kMagic;
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    const std::string& bytes() const { return bytes_; }

private:
    template <typename T>
    T read() {
        if (remaining() < sizeof(T)) {
            throw SnapshotError("snapshot truncated");
        }
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::string bytes_;
    std::size_t pos_ = 0;
};

void append_section(ByteWriter& out, std::uint32_t id, const ByteWriter& payload) {
    out.u32(id);
    out.u64(payload.buffer().size());
    out.bytes(payload.buffer().data(), payload.buffer().size());
}

// Reads the section header for `expected` and returns its payload length.
std::uint64_t open_section(ByteReader& in, std::uint32_t expected) {
    const std::uint32_t id = in.u32();
    if (id != expected) {
        throw SnapshotError("unexpected section " + std::to_string(id) + " (wanted " +
                            std::to_string(expected) + ")");
    }
    const std::uint64_t length = in.u64();
    if (length > in.remaining()) {
        throw SnapshotError("section " + std::to_string(expected) + " overruns the file");
    }
    return length;
}

}  // namespace

void write_snapshot(const std::string& path, const SlidingWindow& window,
                    const AnnConfig& ann_config, std::span<const StreamRecord> live_records) {
    const std::vector<RecordId> live = window.live_ids();
    if (live.size() != live_records.size()) {
        throw std::invalid_argument("snapshot expects " + std::to_string(live.size()) +
                                    " live records, got " + std::to_string(live_records.size()));
    }
    for (std::size_t i = 0; i < live.size(); ++i) {
        if (live_records[i].id != live[i]) {
            throw std::invalid_argument("live records must be passed in window live order");
        }
    }
    const ModalitySchema& schema = window.schema();
    const WindowConfig& wconfig = window.config();

    ByteWriter schema_section;
    schema_section.u32(static_cast<std::uint32_t>(schema.content_count()));
    for (int dim : schema.content_dims()) {
        schema_section.u32(static_cast<std::uint32_t>(dim));
    }

    ByteWriter config_section;
    config_section.f64(wconfig.unit_seconds);
    config_section.u32(static_cast<std::uint32_t>(wconfig.bucket_count));
    config_section.f64(wconfig.epoch);
    config_section.u32(wconfig.allow_unordered ? 1 : 0);
    config_section.u32(static_cast<std::uint32_t>(ann_config.dim));
    config_section.u32(static_cast<std::uint32_t>(ann_config.max_neighbors));
    config_section.u32(static_cast<std::uint32_t>(ann_config.ef_construction));
    config_section.u32(static_cast<std::uint32_t>(ann_config.default_ef_search));
    config_section.f64(ann_config.fragmentation_threshold);
    config_section.u64(ann_config.seed);

    ByteWriter state_section;
    state_section.i64(window.current_unit());
    state_section.f64(window.last_advance_time());
    state_section.f64(window.last_ingest_time());
    state_section.u64(window.live_count());
    state_section.u64(window.discarded_count());
    state_section.u32(static_cast<std::uint32_t>(window.buckets().size()));
    for (const BucketManifest& bucket : window.buckets()) {
        state_section.i64(bucket.unit_index);
        state_section.u64(bucket.first_node);
        state_section.u64(bucket.last_node);
        state_section.u64(bucket.record_ids.size());
        for (RecordId id : bucket.record_ids) {
            state_section.u64(id);
        }
    }

    ByteWriter record_section;
    record_section.u64(live_records.size());
    for (const StreamRecord& record : live_records) {
        record_section.u64(record.id);
        record_section.f64(record.time);
        record_section.f64(record.location.latitude);
        record_section.f64(record.location.longitude);
        if (static_cast<int>(record.content.size()) != schema.content_count()) {
            throw std::invalid_argument("record " + std::to_string(record.id) +
                                        " does not match the schema");
        }
        for (int slot = 0; slot < schema.content_count(); ++slot) {
            const auto& block = record.content[static_cast<std::size_t>(slot)];
            if (static_cast<int>(block.size()) != schema.block_dim(slot)) {
                throw std::invalid_argument("record " + std::to_string(record.id) +
                                            " does not match the schema");
            }
            record_section.bytes(block.data(), block.size() * sizeof(double));
        }
    }

    ByteWriter out;
    out.bytes(kMagic, sizeof kMagic);
    out.u32(kVersion);
    append_section(out, kSectionSchema, schema_section);
    append_section(out, kSectionEngineConfig, config_section);
    append_section(out, kSectionWindowState, state_section);
    append_section(out, kSectionRecords, record_section);

    ByteWriter checksum;
    checksum.u64(fnv1a(out.buffer()));
    append_section(out, kSectionChecksum, checksum);

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    file.write(out.buffer().data(), static_cast<std::streamsize>(out.buffer().size()));
    if (!file) {
        throw std::runtime_error("failed while writing '" + path + "'");
    }
}

RestoredEngine read_snapshot(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw SnapshotError("cannot open snapshot '" + path + "'");
    }
    std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    ByteReader in(std::move(bytes));

    in.expect_magic();
    const std::uint32_t version = in.u32();
    if (version != kVersion) {
        throw SnapshotError("unsupported snapshot version " + std::to_string(version));
    }

    // Schema.
    open_section(in, kSectionSchema);
    const std::uint32_t content_count = in.u32();
    if (content_count == 0 || content_count > 4096) {
        throw SnapshotError("implausible content modality count");
    }
    std::vector<int> content_dims(content_count);
    for (auto& dim : content_dims) {
        dim = static_cast<int>(in.u32());
    }

    // Engine configuration.
    open_section(in, kSectionEngineConfig);
    WindowConfig wconfig;
    wconfig.unit_seconds = in.f64();
    wconfig.bucket_count = static_cast<int>(in.u32());
    wconfig.epoch = in.f64();
    wconfig.allow_unordered = in.u32() != 0;
    AnnConfig ann_config;
    ann_config.dim = static_cast<int>(in.u32());
    ann_config.max_neighbors = static_cast<int>(in.u32());
    ann_config.ef_construction = static_cast<int>(in.u32());
    ann_config.default_ef_search = static_cast<int>(in.u32());
    ann_config.fragmentation_threshold = in.f64();
    ann_config.seed = in.u64();

    // Window state.
    open_section(in, kSectionWindowState);
    const std::int64_t current_unit = in.i64();
    const double last_advance_time = in.f64();
    in.f64();  // last ingest time: not replayable once older records expire
    const std::uint64_t live_count = in.u64();
    in.u64();  // discarded count: informational, not replayable
    const std::uint32_t bucket_count = in.u32();
    if (static_cast<int>(bucket_count) != wconfig.bucket_count) {
        throw SnapshotError("manifest count does not match the window configuration");
    }
    struct StoredBucket {
        std::int64_t unit_index;
        std::vector<RecordId> record_ids;
    };
    std::vector<StoredBucket> stored_buckets(bucket_count);
    for (auto& bucket : stored_buckets) {
        bucket.unit_index = in.i64();
        in.u64();  // first_node: tied to the old index's insertion history
        in.u64();  // last_node
        const std::uint64_t ids = in.u64();
        if (ids > in.remaining() / sizeof(std::uint64_t)) {
            throw SnapshotError("manifest id list overruns the file");
        }
        bucket.record_ids.resize(ids);
        for (auto& id : bucket.record_ids) {
            id = in.u64();
        }
    }

    // Records.
    open_section(in, kSectionRecords);
    ModalitySchema schema(content_dims);
    const std::uint64_t record_count = in.u64();
    if (record_count != live_count) {
        throw SnapshotError("record section does not match the stored live count");
    }
    std::vector<StreamRecord> records;
    records.reserve(record_count);
    for (std::uint64_t i = 0; i < record_count; ++i) {
        StreamRecord record;
        record.id = in.u64();
        record.time = in.f64();
        record.location.latitude = in.f64();
        record.location.longitude = in.f64();
        record.content.resize(static_cast<std::size_t>(schema.content_count()));
        for (int slot = 0; slot < schema.content_count(); ++slot) {
            auto& block = record.content[static_cast<std::size_t>(slot)];
            block.resize(static_cast<std::size_t>(schema.block_dim(slot)));
            for (double& x : block) {
                x = in.f64();
            }
        }
        records.push_back(std::move(record));
    }

    // Checksum covers everything before its own section header.
    const std::size_t checksum_start = in.position();
    open_section(in, kSectionChecksum);
    const std::uint64_t stored_hash = in.u64();
    const std::uint64_t actual_hash = fnv1a(in.bytes().substr(0, checksum_start));
    if (stored_hash != actual_hash) {
        throw SnapshotError("snapshot checksum mismatch");
    }

    // Replay: jump the window to its final position, then re-ingest the live
    // records.  All of them fall inside the live aperture, so nothing is
    // retired or discarded and the manifests must come out identical.
    RestoredEngine engine{std::move(schema), wconfig, ann_config, nullptr, nullptr,
                          std::move(records)};
    engine.window = std::make_unique<SlidingWindow>(wconfig, engine.schema);
    engine.index = std::make_unique<HnswIndex>(ann_config);
    engine.window->advance(last_advance_time, *engine.index);
    for (const StreamRecord& record : engine.records) {
        if (!engine.window->ingest(record, *engine.index).has_value()) {
            throw SnapshotError("live record " + std::to_string(record.id) +
                                " fell outside the window on replay");
        }
    }

    if (engine.window->current_unit() != current_unit ||
        engine.window->live_count() != live_count) {
        throw SnapshotError("replayed window state does not match the snapshot");
    }
    const auto& buckets = engine.window->buckets();
    for (std::size_t slot = 0; slot < buckets.size(); ++slot) {
        if (buckets[slot].unit_index != stored_buckets[slot].unit_index ||
            buckets[slot].record_ids != stored_buckets[slot].record_ids) {
            throw SnapshotError("replayed bucket manifests do not match the snapshot");
        }
    }
    return engine;
}

}  // namespace spatcode
