#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace qb {

/// Single-consumer source of draws. Returns nullopt when exhausted;
/// synthetic generators never exhaust.
template <class T>
class SampleStream {
public:
    virtual ~SampleStream() = default;
    virtual std::optional<T> next() = 0;
};

/// Stream over a materialized sample list. With cycle=true the list is
/// replayed epoch-style, so an optimizer may take more steps than there are
/// samples.
template <class T>
class VectorStream final : public SampleStream<T> {
public:
    explicit VectorStream(std::vector<T> items, bool cycle = false)
        : items_(std::move(items)), cycle_(cycle) {}

    std::optional<T> next() override {
        if (pos_ >= items_.size()) {
            if (!cycle_ || items_.empty()) return std::nullopt;
            pos_ = 0;
        }
        return items_[pos_++];
    }

private:
    std::vector<T> items_;
    bool cycle_;
    std::size_t pos_ = 0;
};

template <class T>
class FunctionStream final : public SampleStream<T> {
public:
    explicit FunctionStream(std::function<std::optional<T>()> fn) : fn_(std::move(fn)) {}

    std::optional<T> next() override { return fn_(); }

private:
    std::function<std::optional<T>()> fn_;
};

} // namespace qb
