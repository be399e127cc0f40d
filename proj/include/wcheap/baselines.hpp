#ifndef WCHEAP_BASELINES_HPP
#define WCHEAP_BASELINES_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "wcheap/types.hpp"

namespace wcheap {

// Baseline priority queues for the benchmark CLI. They speak the same
// minimal interface as the main heap and count comparisons through the same
// instrumented comparator, so workload numbers are directly comparable.

class BinaryHeap {
public:
    using Handle = std::uint64_t;  // the key id

    Handle insert(std::int64_t value, std::uint64_t id) {
        slots_.push_back(Key{value, id});
        pos_[id] = slots_.size() - 1;
        sift_up(slots_.size() - 1);
        return id;
    }

    std::optional<Key> find_min() const {
        if (slots_.empty()) return std::nullopt;
        return slots_.front();
    }

    Key delete_min() {
        if (slots_.empty()) throw Error(Error::Code::EmptyHeap, "binary heap empty");
        Key out = slots_.front();
        pos_.erase(out.id);
        Key last = slots_.back();
        slots_.pop_back();
        if (!slots_.empty()) {
            slots_.front() = last;
            pos_[last.id] = 0;
            sift_down(0);
        }
        return out;
    }

    void decrease_key(Handle id, std::int64_t new_value) {
        auto it = pos_.find(id);
        if (it == pos_.end()) throw Error(Error::Code::InvalidHandle, "binary heap: no such id");
        std::size_t i = it->second;
        if (new_value >= slots_[i].value)
            throw Error(Error::Code::KeyIncrease, "binary heap: not a decrease");
        slots_[i].value = new_value;
        sift_up(i);
    }

    std::size_t size() const { return slots_.size(); }
    const CostCounters& counters() const { return counters_; }

private:
    void swap_slots(std::size_t i, std::size_t j) {
        std::swap(slots_[i], slots_[j]);
        pos_[slots_[i].id] = i;
        pos_[slots_[j].id] = j;
    }

    void sift_up(std::size_t i) {
        while (i > 0) {
            std::size_t p = (i - 1) / 2;
            if (!key_less(slots_[i], slots_[p], counters_)) break;
            swap_slots(i, p);
            i = p;
        }
    }

    void sift_down(std::size_t i) {
        for (;;) {
            std::size_t l = 2 * i + 1, r = l + 1, m = i;
            if (l < slots_.size() && key_less(slots_[l], slots_[m], counters_)) m = l;
            if (r < slots_.size() && key_less(slots_[r], slots_[m], counters_)) m = r;
            if (m == i) break;
            swap_slots(i, m);
            i = m;
        }
    }

    std::vector<Key> slots_;
    std::unordered_map<std::uint64_t, std::size_t> pos_;
    CostCounters counters_;
};

class PairingHeap {
public:
    using Handle = std::uint64_t;

    ~PairingHeap() {
        for (auto& [id, n] : nodes_) delete n;
    }

    Handle insert(std::int64_t value, std::uint64_t id) {
        Node* n = new Node{Key{value, id}};
        nodes_[id] = n;
        root_ = root_ ? merge(root_, n) : n;
        ++size_;
        return id;
    }

    std::optional<Key> find_min() const {
        if (!root_) return std::nullopt;
        return root_->key;
    }

    Key delete_min() {
        if (!root_) throw Error(Error::Code::EmptyHeap, "pairing heap empty");
        Node* old = root_;
        Key out = old->key;
        root_ = merge_pairs(old->child);
        if (root_) root_->parent = nullptr;
        nodes_.erase(out.id);
        delete old;
        --size_;
        return out;
    }

    void decrease_key(Handle id, std::int64_t new_value) {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) throw Error(Error::Code::InvalidHandle, "pairing heap: no id");
        Node* n = it->second;
        if (new_value >= n->key.value)
            throw Error(Error::Code::KeyIncrease, "pairing heap: not a decrease");
        n->key.value = new_value;
        if (n == root_) return;
        cut(n);
        root_ = merge(root_, n);
    }

    std::size_t size() const { return size_; }
    const CostCounters& counters() const { return counters_; }

private:
    struct Node {
        Key key;
        Node* child = nullptr;
        Node* sibling = nullptr;
        Node* parent = nullptr;  // real parent for the first child, otherwise left sibling
    };

    void cut(Node* n) {
        Node* p = n->parent;
        if (p->child == n) {
            p->child = n->sibling;
        } else {
            // p is the left sibling here
            p->sibling = n->sibling;
        }
        if (n->sibling) n->sibling->parent = p;
        n->sibling = nullptr;
        n->parent = nullptr;
    }

    Node* merge(Node* a, Node* b) {
        if (!a) return b;
        if (!b) return a;
        if (key_less(b->key, a->key, counters_)) std::swap(a, b);
        b->sibling = a->child;
        if (a->child) a->child->parent = b;
        b->parent = a;
        a->child = b;
        return a;
    }

    Node* merge_pairs(Node* first) {
        // Two-pass pairing, iterative to keep deep heaps off the call stack.
        std::vector<Node*> pairs;
        Node* n = first;
        while (n) {
            Node* a = n;
            Node* b = n->sibling;
            n = b ? b->sibling : nullptr;
            a->sibling = nullptr;
            a->parent = nullptr;
            if (b) {
                b->sibling = nullptr;
                b->parent = nullptr;
            }
            pairs.push_back(merge(a, b));
        }
        Node* result = nullptr;
        for (std::size_t i = pairs.size(); i-- > 0;) result = merge(result, pairs[i]);
        return result;
    }

    Node* root_ = nullptr;
    std::size_t size_ = 0;
    std::unordered_map<std::uint64_t, Node*> nodes_;
    CostCounters counters_;
};

}  // namespace wcheap

#endif  // WCHEAP_BASELINES_HPP
