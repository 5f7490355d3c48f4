#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drgep/common.hpp"

namespace drgep {

enum class QueueKind { naive, binary_heap, fibonacci_heap };

inline const char* to_string(QueueKind kind) {
    switch (kind) {
        case QueueKind::naive: return "naive";
        case QueueKind::binary_heap: return "binary-heap";
        case QueueKind::fibonacci_heap: return "fibonacci-heap";
    }
    return "?";
}

namespace detail {

// Shared total order: higher key wins, ties go to the lower node id. Every
// queue implementation extracts in exactly this order, which makes their
// extraction sequences comparable element for element.
inline bool queue_before(double key_a, int id_a, double key_b, int id_b) {
    if (key_a != key_b) return key_a > key_b;
    return id_a < id_b;
}

}  // namespace detail

/// Linear-scan max-priority queue. No structure to maintain; extract_max
/// scans all live entries.
class NaiveMaxQueue {
public:
    explicit NaiveMaxQueue(std::span<const double> keys)
        : keys_(keys.begin(), keys.end()), live_(keys.size(), 1), size_(keys.size()) {}

    bool empty() const { return size_ == 0; }
    std::size_t size() const { return size_; }
    bool contains(int node) const { return in_range(node) && live_[static_cast<std::size_t>(node)]; }
    double key(int node) const { return keys_[static_cast<std::size_t>(node)]; }

    std::pair<int, double> extract_max() {
        if (size_ == 0) throw Error("extract_max on empty queue");
        int best = -1;
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            if (!live_[i]) continue;
            if (best < 0 || detail::queue_before(keys_[i], static_cast<int>(i), keys_[static_cast<std::size_t>(best)], best))
                best = static_cast<int>(i);
        }
        live_[static_cast<std::size_t>(best)] = 0;
        --size_;
        return {best, keys_[static_cast<std::size_t>(best)]};
    }

    void increase_key(int node, double new_key) {
        check_increase(node, new_key);
        keys_[static_cast<std::size_t>(node)] = new_key;
    }

protected:
    bool in_range(int node) const { return node >= 0 && node < static_cast<int>(keys_.size()); }

    void check_increase(int node, double new_key) const {
        if (!in_range(node) || !live_[static_cast<std::size_t>(node)])
            throw Error("increase_key on node not in queue: " + std::to_string(node));
        if (new_key < keys_[static_cast<std::size_t>(node)])
            throw Error("increase_key would decrease key of node " + std::to_string(node));
    }

    std::vector<double> keys_;
    std::vector<char> live_;
    std::size_t size_;
};

/// Array-backed binary max-heap with a position index for increase_key.
/// With checked = true, parent dominance is verified after every mutation.
class BinaryMaxHeap {
public:
    explicit BinaryMaxHeap(std::span<const double> keys, bool checked = false)
        : keys_(keys.begin(), keys.end()), pos_(keys.size()), heap_(keys.size()), checked_(checked) {
        for (std::size_t i = 0; i < heap_.size(); ++i) heap_[i] = static_cast<int>(i);
        for (std::size_t i = 0; i < heap_.size(); ++i) pos_[i] = static_cast<int>(i);
        if (heap_.size() > 1)
            for (std::size_t i = heap_.size() / 2; i-- > 0;) sift_down(i);
        if (checked_) verify();
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    bool contains(int node) const {
        return node >= 0 && node < static_cast<int>(pos_.size()) && pos_[static_cast<std::size_t>(node)] >= 0;
    }
    double key(int node) const { return keys_[static_cast<std::size_t>(node)]; }

    std::pair<int, double> extract_max() {
        if (heap_.empty()) throw Error("extract_max on empty queue");
        const int top = heap_.front();
        const double top_key = keys_[static_cast<std::size_t>(top)];
        const int last = heap_.back();
        heap_.pop_back();
        pos_[static_cast<std::size_t>(top)] = -1;
        if (!heap_.empty() && last != top) {
            heap_.front() = last;
            pos_[static_cast<std::size_t>(last)] = 0;
            sift_down(0);
        }
        if (checked_) verify();
        return {top, top_key};
    }

    void increase_key(int node, double new_key) {
        if (!contains(node))
            throw Error("increase_key on node not in queue: " + std::to_string(node));
        if (new_key < keys_[static_cast<std::size_t>(node)])
            throw Error("increase_key would decrease key of node " + std::to_string(node));
        keys_[static_cast<std::size_t>(node)] = new_key;
        sift_up(static_cast<std::size_t>(pos_[static_cast<std::size_t>(node)]));
        if (checked_) verify();
    }

    /// Throws unless every parent dominates its children under the queue order.
    void verify() const {
        for (std::size_t i = 1; i < heap_.size(); ++i) {
            const std::size_t parent = (i - 1) / 2;
            if (detail::queue_before(keys_[static_cast<std::size_t>(heap_[i])], heap_[i],
                                     keys_[static_cast<std::size_t>(heap_[parent])], heap_[parent]))
                throw Error("binary heap invariant violated at slot " + std::to_string(i));
        }
        for (std::size_t i = 0; i < heap_.size(); ++i)
            if (pos_[static_cast<std::size_t>(heap_[i])] != static_cast<int>(i))
                throw Error("binary heap position index inconsistent");
    }

private:
    bool before(int a, int b) const {
        return detail::queue_before(keys_[static_cast<std::size_t>(a)], a, keys_[static_cast<std::size_t>(b)], b);
    }

    void place(std::size_t slot, int node) {
        heap_[slot] = node;
        pos_[static_cast<std::size_t>(node)] = static_cast<int>(slot);
    }

    void sift_up(std::size_t slot) {
        const int node = heap_[slot];
        while (slot > 0) {
            const std::size_t parent = (slot - 1) / 2;
            if (!before(node, heap_[parent])) break;
            place(slot, heap_[parent]);
            slot = parent;
        }
        place(slot, node);
    }

    void sift_down(std::size_t slot) {
        const int node = heap_[slot];
        const std::size_t n = heap_.size();
        while (true) {
            std::size_t best = slot;
            int best_node = node;
            const std::size_t left = 2 * slot + 1;
            const std::size_t right = left + 1;
            if (left < n && before(heap_[left], best_node)) {
                best = left;
                best_node = heap_[left];
            }
            if (right < n && before(heap_[right], best_node)) {
                best = right;
                best_node = heap_[right];
            }
            if (best == slot) break;
            place(slot, best_node);
            slot = best;
        }
        place(slot, node);
    }

    std::vector<double> keys_;
    std::vector<int> pos_;  // node id -> heap slot, -1 once extracted
    std::vector<int> heap_;
    bool checked_;
};

/// Fibonacci max-heap. Nodes live in a fixed array (the queue is built with
/// the full node set and never reinserts), so links are plain indices.
/// increase_key cuts the node to the root list with cascading cuts;
/// extract_max consolidates roots so at most one root per degree remains.
class FibonacciMaxHeap {
public:
    explicit FibonacciMaxHeap(std::span<const double> keys)
        : keys_(keys.begin(), keys.end()), nodes_(keys.size()), live_(keys.size(), 1), size_(keys.size()) {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            auto id = static_cast<int>(i);
            nodes_[i] = Node{};
            add_root(id);
            if (max_ < 0 || before(id, max_)) max_ = id;
        }
    }

    bool empty() const { return size_ == 0; }
    std::size_t size() const { return size_; }
    bool contains(int node) const {
        return node >= 0 && node < static_cast<int>(live_.size()) && live_[static_cast<std::size_t>(node)];
    }
    double key(int node) const { return keys_[static_cast<std::size_t>(node)]; }

    std::pair<int, double> extract_max() {
        if (size_ == 0) throw Error("extract_max on empty queue");
        const int top = max_;
        const double top_key = keys_[static_cast<std::size_t>(top)];

        // Promote children of the extracted root, then drop it.
        int child = node(top).child;
        if (child >= 0) {
            int c = child;
            do {
                const int next = node(c).right;
                node(c).parent = -1;
                node(c).mark = false;
                c = next;
            } while (c != child);
            splice_into_roots(child);
            node(top).child = -1;
            node(top).degree = 0;
        }
        const int next_root = node(top).right;
        remove_from_siblings(top);
        if (roots_head_ == top) roots_head_ = (next_root == top) ? -1 : next_root;
        live_[static_cast<std::size_t>(top)] = 0;
        --size_;

        consolidate();
        return {top, top_key};
    }

    void increase_key(int node_id, double new_key) {
        if (!contains(node_id))
            throw Error("increase_key on node not in queue: " + std::to_string(node_id));
        if (new_key < keys_[static_cast<std::size_t>(node_id)])
            throw Error("increase_key would decrease key of node " + std::to_string(node_id));
        keys_[static_cast<std::size_t>(node_id)] = new_key;
        const int parent = node(node_id).parent;
        if (parent >= 0 && before(node_id, parent)) {
            cut(node_id, parent);
            cascading_cut(parent);
        }
        if (before(node_id, max_)) max_ = node_id;
    }

    /// Structural self-check for tests: sibling ring consistency, heap order
    /// along parent links, max pointer correctness, and (after extract_max
    /// has consolidated) at most one root per degree.
    void validate(bool expect_consolidated) const {
        std::vector<char> seen(live_.size(), 0);
        std::vector<char> root_degree_seen(64, 0);
        if ((roots_head_ < 0) != (size_ == 0)) throw Error("fib heap root list inconsistent with size");
        if (roots_head_ >= 0) {
            int r = roots_head_;
            do {
                if (node(r).parent != -1) throw Error("fib heap root has a parent");
                if (expect_consolidated) {
                    if (node(r).degree >= 64 || root_degree_seen[static_cast<std::size_t>(node(r).degree)])
                        throw Error("fib heap has two roots of equal degree after consolidate");
                    root_degree_seen[static_cast<std::size_t>(node(r).degree)] = 1;
                }
                validate_subtree(r, seen);
                r = node(r).right;
            } while (r != roots_head_);
        }
        std::size_t counted = 0;
        for (std::size_t i = 0; i < seen.size(); ++i) {
            if (seen[i] != live_[i]) throw Error("fib heap live set mismatch");
            counted += static_cast<std::size_t>(seen[i]);
        }
        if (counted != size_) throw Error("fib heap size mismatch");
        if (size_ > 0) {
            for (std::size_t i = 0; i < live_.size(); ++i)
                if (live_[i] && before(static_cast<int>(i), max_)) throw Error("fib heap max pointer stale");
        }
    }

private:
    struct Node {
        int parent = -1;
        int child = -1;
        int left = -1;
        int right = -1;
        int degree = 0;
        bool mark = false;
    };

    Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
    const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

    bool before(int a, int b) const {
        return detail::queue_before(keys_[static_cast<std::size_t>(a)], a, keys_[static_cast<std::size_t>(b)], b);
    }

    void add_root(int id) {
        if (roots_head_ < 0) {
            node(id).left = node(id).right = id;
            roots_head_ = id;
        } else {
            insert_after(roots_head_, id);
        }
        node(id).parent = -1;
    }

    void insert_after(int anchor, int id) {
        node(id).left = anchor;
        node(id).right = node(anchor).right;
        node(node(anchor).right).left = id;
        node(anchor).right = id;
    }

    void remove_from_siblings(int id) {
        node(node(id).left).right = node(id).right;
        node(node(id).right).left = node(id).left;
        node(id).left = node(id).right = id;
    }

    // Splices a whole sibling ring into the root list.
    void splice_into_roots(int ring) {
        if (roots_head_ < 0) {
            roots_head_ = ring;
            return;
        }
        const int a = roots_head_;
        const int a_next = node(a).right;
        const int b = ring;
        const int b_prev = node(b).left;
        node(a).right = b;
        node(b).left = a;
        node(b_prev).right = a_next;
        node(a_next).left = b_prev;
    }

    void link(int child, int parent) {
        remove_from_siblings(child);
        node(child).parent = parent;
        node(child).mark = false;
        if (node(parent).child < 0) {
            node(parent).child = child;
            node(child).left = node(child).right = child;
        } else {
            insert_after(node(parent).child, child);
        }
        ++node(parent).degree;
    }

    void consolidate() {
        max_ = -1;
        if (roots_head_ < 0) return;

        std::vector<int> roots;
        int r = roots_head_;
        do {
            roots.push_back(r);
            r = node(r).right;
        } while (r != roots_head_);

        int by_degree[64];
        for (int& slot : by_degree) slot = -1;
        for (int root : roots) {
            int x = root;
            while (true) {
                const int d = node(x).degree;
                if (by_degree[d] < 0) {
                    by_degree[d] = x;
                    break;
                }
                int y = by_degree[d];
                by_degree[d] = -1;
                if (before(y, x)) std::swap(x, y);
                link(y, x);
            }
        }

        roots_head_ = -1;
        for (int slot : by_degree) {
            if (slot < 0) continue;
            node(slot).left = node(slot).right = slot;
            add_root(slot);
            if (max_ < 0 || before(slot, max_)) max_ = slot;
        }
    }

    void cut(int id, int parent) {
        if (node(parent).child == id)
            node(parent).child = (node(id).right == id) ? -1 : node(id).right;
        remove_from_siblings(id);
        --node(parent).degree;
        add_root(id);
        node(id).mark = false;
    }

    void cascading_cut(int id) {
        const int parent = node(id).parent;
        if (parent < 0) return;
        if (!node(id).mark) {
            node(id).mark = true;
        } else {
            cut(id, parent);
            cascading_cut(parent);
        }
    }

    void validate_subtree(int id, std::vector<char>& seen) const {
        if (seen[static_cast<std::size_t>(id)]) throw Error("fib heap node visited twice");
        seen[static_cast<std::size_t>(id)] = 1;
        const int child = node(id).child;
        if (child < 0) return;
        int c = child;
        int degree = 0;
        do {
            if (node(c).parent != id) throw Error("fib heap child parent link broken");
            if (before(c, id)) throw Error("fib heap order violated");
            validate_subtree(c, seen);
            ++degree;
            c = node(c).right;
        } while (c != child);
        if (degree != node(id).degree) throw Error("fib heap degree mismatch");
    }

    std::vector<double> keys_;
    std::vector<Node> nodes_;
    std::vector<char> live_;
    std::size_t size_;
    int roots_head_ = -1;
    int max_ = -1;
};

}  // namespace drgep
