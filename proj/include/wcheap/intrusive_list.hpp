#ifndef WCHEAP_INTRUSIVE_LIST_HPP
#define WCHEAP_INTRUSIVE_LIST_HPP

#include "wcheap/types.hpp"

namespace wcheap::detail {

// Doubly linked list with cyclic left pointers: left of the leftmost element
// points to the rightmost, right of the rightmost is null. Both ends are
// reachable in O(1) from the single head pointer. Links live inside the
// elements; the accessor type selects which pair of fields is used, so nodes
// can sit on a sibling list and the global node list at the same time.
template <class T, class Links>
struct IntrusiveList {
    T* head = nullptr;

    bool empty() const { return head == nullptr; }
    T* leftmost() const { return head; }
    T* rightmost() const { return head ? Links::left(head) : nullptr; }
    bool single() const { return head && Links::left(head) == head; }

    // Real neighbors, i.e. without the cyclic wrap-around.
    T* real_left(T* x) const { return x == head ? nullptr : Links::left(x); }
    T* real_right(T* x) const { return Links::right(x); }

    void push_left(T* x) {
        if (!head) {
            Links::left(x) = x;
            Links::right(x) = nullptr;
        } else {
            Links::left(x) = Links::left(head);
            Links::right(x) = head;
            Links::left(head) = x;
        }
        head = x;
    }

    void push_right(T* x) {
        if (!head) {
            push_left(x);
            return;
        }
        T* last = Links::left(head);
        Links::right(last) = x;
        Links::left(x) = last;
        Links::right(x) = nullptr;
        Links::left(head) = x;
    }

    void insert_after(T* pos, T* x) {
        T* nxt = Links::right(pos);
        if (!nxt) {
            push_right(x);
            return;
        }
        Links::right(pos) = x;
        Links::left(x) = pos;
        Links::right(x) = nxt;
        Links::left(nxt) = x;
    }

    void insert_before(T* pos, T* x) {
        if (pos == head) {
            push_left(x);
            return;
        }
        T* prv = Links::left(pos);
        Links::right(prv) = x;
        Links::left(x) = prv;
        Links::right(x) = pos;
        Links::left(pos) = x;
    }

    void remove(T* x) {
        T* l = Links::left(x);
        T* r = Links::right(x);
        if (x == head) {
            head = r;
            if (r) Links::left(r) = l;  // rightmost unchanged
        } else if (!r) {
            // rightmost, not head
            Links::right(l) = nullptr;
            Links::left(head) = l;
        } else {
            Links::right(l) = r;
            Links::left(r) = l;
        }
        Links::left(x) = nullptr;
        Links::right(x) = nullptr;
    }

    // Move the whole content of `other` to the left of this list. O(1).
    void splice_prepend(IntrusiveList& other) {
        if (other.head == nullptr) return;
        if (!head) {
            head = other.head;
            other.head = nullptr;
            return;
        }
        T* other_last = Links::left(other.head);
        T* self_last = Links::left(head);
        Links::right(other_last) = head;
        Links::left(head) = other_last;
        Links::left(other.head) = self_last;
        head = other.head;
        other.head = nullptr;
    }

    template <class Fn>
    void for_each(Fn&& fn) const {
        for (T* x = head; x; x = Links::right(x)) fn(x);
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (T* x = head; x; x = Links::right(x)) ++n;
        return n;
    }
};

}  // namespace wcheap::detail

#endif  // WCHEAP_INTRUSIVE_LIST_HPP
