#include "geolock/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "geolock/cryptocore.hpp"
#include "geolock/rng.hpp"

namespace geolock {

TickDelta NoiseModel::sample(std::string_view receiver_id, std::uint32_t seq) const {
    if (sigma_ticks == 0.0) return TickDelta{0};
    double z = standard_normal(stream_key(seed, receiver_id, seq));
    return TickDelta{std::llround(z * sigma_ticks)};
}

SlotWidth Scenario::slot_width(const CadenceConfig& cfg) const {
    if (slot_width_ticks) {
        SlotWidth slot{TickDelta{*slot_width_ticks}};
        if (!fits_in_window(worst_case_span(slot, cfg), cfg))
            throw ConfigError("slot_width_ticks: worst-case schedule exceeds the time window");
        return slot;
    }
    return slot_width_from_region(region, cfg);
}

std::vector<Anchor> Scenario::schedule_anchors() const {
    std::vector<Anchor> out;
    out.reserve(33);
    if (anchor_sequence) {
        for (const auto& id : *anchor_sequence)
            for (const auto& a : anchors)
                if (a.id == id) {
                    out.push_back(a);
                    break;
                }
    } else {
        for (std::size_t i = 0; i < 33; ++i) out.push_back(anchors[i % anchors.size()]);
    }
    return out;
}

bool Scenario::single_anchor() const {
    auto seq = schedule_anchors();
    for (const auto& a : seq)
        if (a.id != seq.front().id) return false;
    return true;
}

namespace {

nlohmann::json point_json(const Point3& p) { return nlohmann::json::array({p.x, p.y, p.z}); }

struct Validator {
    std::vector<std::string> errs;

    void fail(const std::string& path, const std::string& what) { errs.push_back(path + ": " + what); }

    bool number(const nlohmann::json& j, const std::string& path, double& out) {
        if (!j.is_number()) {
            fail(path, "expected a number");
            return false;
        }
        out = j.get<double>();
        return true;
    }

    bool point(const nlohmann::json& j, const std::string& path, Point3& out) {
        if (!j.is_array() || j.size() != 3) {
            fail(path, "expected [x, y, z]");
            return false;
        }
        bool ok = number(j[0], path + "[0]", out.x) && number(j[1], path + "[1]", out.y) &&
                  number(j[2], path + "[2]", out.z);
        if (ok && !is_finite(out)) {
            fail(path, "coordinates must be finite");
            return false;
        }
        return ok;
    }
};

}  // namespace

nlohmann::json Scenario::to_json() const {
    nlohmann::json j;
    j["anchors"] = nlohmann::json::array();
    for (const auto& a : anchors) j["anchors"].push_back({{"id", a.id}, {"pos", point_json(a.position)}});
    j["authorized_region"] = {{"center", point_json(region.center)}, {"radius_m", region.radius_m}};
    if (anchor_sequence) j["anchor_sequence"] = *anchor_sequence;
    j["receivers"] = nlohmann::json::array();
    for (const auto& r : receivers)
        j["receivers"].push_back({{"id", r.id},
                                  {"pos", point_json(r.position)},
                                  {"role", r.role == Role::intended ? "intended" : "eavesdropper"}});
    j["password"] = password;
    j["noise"] = {{"sigma_ticks", noise.sigma_ticks}, {"seed", noise.seed}};
    if (payload_path) j["payload_path"] = *payload_path;
    if (slot_width_ticks) j["slot_width_ticks"] = *slot_width_ticks;
    return j;
}

std::string Scenario::digest() const {
    std::string dump = to_json().dump();
    auto hash = sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(dump.data()), dump.size()));
    return to_hex(hash).substr(0, 16);
}

Scenario scenario_from_json(const nlohmann::json& j) {
    Validator v;
    Scenario s;

    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");

    static const std::set<std::string> known{"anchors",    "authorized_region", "anchor_sequence",
                                             "receivers",  "password",          "noise",
                                             "payload_path", "slot_width_ticks"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) v.fail(key, "unknown field");

    std::set<std::string> anchor_ids;
    if (!j.contains("anchors") || !j["anchors"].is_array() || j["anchors"].empty()) {
        v.fail("anchors", "expected a non-empty array");
    } else {
        for (std::size_t i = 0; i < j["anchors"].size(); ++i) {
            const auto& a = j["anchors"][i];
            std::string path = "anchors[" + std::to_string(i) + "]";
            Anchor anchor;
            if (!a.is_object() || !a.contains("id") || !a["id"].is_string() ||
                a["id"].get<std::string>().empty()) {
                v.fail(path + ".id", "expected a non-empty string");
            } else {
                anchor.id = a["id"].get<std::string>();
                if (!anchor_ids.insert(anchor.id).second) v.fail(path + ".id", "duplicate anchor id");
            }
            if (!a.is_object() || !a.contains("pos"))
                v.fail(path + ".pos", "missing");
            else
                v.point(a["pos"], path + ".pos", anchor.position);
            s.anchors.push_back(std::move(anchor));
        }
    }

    if (!j.contains("authorized_region") || !j["authorized_region"].is_object()) {
        v.fail("authorized_region", "expected an object");
    } else {
        const auto& r = j["authorized_region"];
        if (!r.contains("center"))
            v.fail("authorized_region.center", "missing");
        else
            v.point(r["center"], "authorized_region.center", s.region.center);
        double radius = 0;
        if (!r.contains("radius_m") || !v.number(r["radius_m"], "authorized_region.radius_m", radius)) {
        } else if (!(radius > 0) || !std::isfinite(radius)) {
            v.fail("authorized_region.radius_m", "must be positive and finite");
        } else {
            s.region.radius_m = radius;
        }
    }

    if (j.contains("anchor_sequence")) {
        if (!j["anchor_sequence"].is_array() || j["anchor_sequence"].size() != 33) {
            v.fail("anchor_sequence", "expected exactly 33 anchor ids");
        } else {
            std::vector<std::string> seq;
            for (std::size_t i = 0; i < 33; ++i) {
                const auto& e = j["anchor_sequence"][i];
                std::string path = "anchor_sequence[" + std::to_string(i) + "]";
                if (!e.is_string()) {
                    v.fail(path, "expected an anchor id string");
                } else if (!anchor_ids.count(e.get<std::string>())) {
                    v.fail(path, "unknown anchor id '" + e.get<std::string>() + "'");
                } else {
                    seq.push_back(e.get<std::string>());
                }
            }
            if (seq.size() == 33) s.anchor_sequence = std::move(seq);
        }
    }

    if (j.contains("receivers")) {
        if (!j["receivers"].is_array()) {
            v.fail("receivers", "expected an array");
        } else {
            std::set<std::string> receiver_ids;
            for (std::size_t i = 0; i < j["receivers"].size(); ++i) {
                const auto& r = j["receivers"][i];
                std::string path = "receivers[" + std::to_string(i) + "]";
                Receiver rx;
                if (!r.is_object() || !r.contains("id") || !r["id"].is_string() ||
                    r["id"].get<std::string>().empty()) {
                    v.fail(path + ".id", "expected a non-empty string");
                } else {
                    rx.id = r["id"].get<std::string>();
                    if (!receiver_ids.insert(rx.id).second) v.fail(path + ".id", "duplicate receiver id");
                }
                if (!r.is_object() || !r.contains("pos"))
                    v.fail(path + ".pos", "missing");
                else
                    v.point(r["pos"], path + ".pos", rx.position);
                if (!r.is_object() || !r.contains("role") || !r["role"].is_string()) {
                    v.fail(path + ".role", "expected \"intended\" or \"eavesdropper\"");
                } else {
                    std::string role = r["role"].get<std::string>();
                    if (role == "intended")
                        rx.role = Role::intended;
                    else if (role == "eavesdropper")
                        rx.role = Role::eavesdropper;
                    else
                        v.fail(path + ".role", "expected \"intended\" or \"eavesdropper\"");
                }
                s.receivers.push_back(std::move(rx));
            }
        }
    }

    if (!j.contains("password") || !j["password"].is_string() ||
        j["password"].get<std::string>().empty())
        v.fail("password", "expected a non-empty string");
    else
        s.password = j["password"].get<std::string>();

    if (j.contains("slot_width_ticks")) {
        if (!j["slot_width_ticks"].is_number_integer() ||
            j["slot_width_ticks"].get<std::int64_t>() < 1)
            v.fail("slot_width_ticks", "expected an integer >= 1");
        else
            s.slot_width_ticks = j["slot_width_ticks"].get<std::int64_t>();
    }

    bool noise_given = j.contains("noise");
    if (noise_given) {
        const auto& n = j["noise"];
        if (!n.is_object()) {
            v.fail("noise", "expected an object");
        } else {
            double sigma = 0;
            if (!n.contains("sigma_ticks") || !v.number(n["sigma_ticks"], "noise.sigma_ticks", sigma)) {
            } else if (sigma < 0 || !std::isfinite(sigma)) {
                v.fail("noise.sigma_ticks", "must be nonnegative and finite");
            } else {
                s.noise.sigma_ticks = sigma;
            }
            if (n.contains("seed")) {
                const auto& seed = n["seed"];
                if (seed.is_number_unsigned())
                    s.noise.seed = seed.get<std::uint64_t>();
                else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0)
                    s.noise.seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
                else
                    v.fail("noise.seed", "expected a nonnegative integer");
            }
        }
    }

    if (j.contains("payload_path")) {
        if (!j["payload_path"].is_string())
            v.fail("payload_path", "expected a string");
        else
            s.payload_path = j["payload_path"].get<std::string>();
    }

    // Slot-width window check and the sigma default both need a valid
    // geometry, so they run only once everything above passed.
    if (v.errs.empty()) {
        try {
            SlotWidth slot = s.slot_width();
            if (!noise_given) s.noise.sigma_ticks = static_cast<double>(slot.ticks().value) / 10.0;
        } catch (const ConfigError& e) {
            for (const auto& line : e.violations) v.errs.push_back(line);
        }
    }

    if (!v.errs.empty()) throw ConfigError(std::move(v.errs));
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    Scenario s = scenario_from_json(j);
    if (const char* env = std::getenv("GEOLOCK_SEED")) {
        char* end = nullptr;
        unsigned long long seed = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw ConfigError("GEOLOCK_SEED: expected an unsigned integer");
        s.noise.seed = seed;
    }
    return s;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace geolock
