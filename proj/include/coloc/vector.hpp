// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <coloc/allocator_traits.hpp>
#include <coloc/partition.hpp>

#include <cstddef>
#include <initializer_list>
#include <iterator>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace coloc {

namespace detail {

// An allocator may bind either a list of targets or a single one; the
// container always partitions over a list.
template <typename TargetType>
struct target_list_traits
{
    using element = TargetType;

    static std::vector<element> as_list(TargetType const& t)
    {
        return {t};
    }
};

template <typename Element>
struct target_list_traits<std::vector<Element>>
{
    using element = Element;

    static std::vector<Element> const& as_list(std::vector<Element> const& t)
    {
        return t;
    }
};

}    // namespace detail

template <typename Vector>
class vector_iterator;

/// Contiguous sequence placed across the targets of its allocator.
/// Exposes the std::vector access subset the parallel algorithms need,
/// plus the block partition so algorithms can co-locate work with data.
template <typename T, typename Allocator>
class vector
{
public:
    using allocator_type = Allocator;
    using traits = coloc::allocator_traits<Allocator>;
    using value_type = T;
    using size_type = std::size_t;
    using difference_type = std::ptrdiff_t;
    using pointer = typename traits::pointer;
    using reference = typename traits::reference;
    using const_reference = typename traits::const_reference;
    using target_element =
        typename detail::target_list_traits<typename traits::target_type>::element;
    using partition_type = coloc::partition<target_element>;
    using iterator = vector_iterator<vector>;
    using const_iterator = vector_iterator<vector const>;

    explicit vector(Allocator alloc)
      : alloc_(std::move(alloc))
    {
    }

    vector(size_type n, Allocator alloc)
      : alloc_(std::move(alloc))
    {
        acquire(n);
        construct_guard guard{*this};
        traits::bulk_construct(alloc_, data_, n);
        guard.armed = false;
    }

    vector(size_type n, T const& value, Allocator alloc)
      : alloc_(std::move(alloc))
    {
        acquire(n);
        construct_guard guard{*this};
        traits::bulk_construct(alloc_, data_, n, value);
        guard.armed = false;
    }

    vector(std::initializer_list<T> init, Allocator alloc)
      : alloc_(std::move(alloc))
    {
        acquire(init.size());
        construct_guard guard{*this};
        traits::bulk_generate(
            alloc_, data_, init.size(), [first = init.begin()](size_type i) {
                return first[static_cast<difference_type>(i)];
            });
        guard.armed = false;
    }

    /// Element i is built from gen(i); construction is co-located with
    /// the owning blocks like any other bulk construction.
    template <typename Gen>
    static vector generate(size_type n, Gen&& gen, Allocator alloc)
    {
        vector v(std::move(alloc));
        v.acquire(n);
        construct_guard guard{v};
        traits::bulk_generate(v.alloc_, v.data_, n, std::forward<Gen>(gen));
        guard.armed = false;
        return v;
    }

    vector(vector&& other) noexcept
      : alloc_(std::move(other.alloc_))
      , data_(std::exchange(other.data_, pointer{}))
      , size_(std::exchange(other.size_, 0))
      , part_(std::move(other.part_))
    {
        other.part_.blocks.clear();
    }

    vector& operator=(vector&& other) noexcept
    {
        if (this != &other)
        {
            release();
            alloc_ = std::move(other.alloc_);
            data_ = std::exchange(other.data_, pointer{});
            size_ = std::exchange(other.size_, 0);
            part_ = std::move(other.part_);
            other.part_.blocks.clear();
        }
        return *this;
    }

    vector(vector const&) = delete;
    vector& operator=(vector const&) = delete;

    ~vector() { release(); }

    size_type size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    reference operator[](size_type i)
    {
        return traits::make_reference(alloc_, data_, i);
    }

    const_reference operator[](size_type i) const
    {
        return traits::make_const_reference(alloc_, data_, i);
    }

    reference at(size_type i)
    {
        check_bounds(i);
        return (*this)[i];
    }

    const_reference at(size_type i) const
    {
        check_bounds(i);
        return (*this)[i];
    }

    iterator begin() noexcept { return iterator(this, 0); }
    iterator end() noexcept { return iterator(this, size_); }
    const_iterator begin() const noexcept { return const_iterator(this, 0); }
    const_iterator end() const noexcept { return const_iterator(this, size_); }
    const_iterator cbegin() const noexcept { return begin(); }
    const_iterator cend() const noexcept { return end(); }

    /// Block decomposition of the element range across the bound targets.
    partition_type const& distribution() const noexcept { return part_; }

    /// Partition block owning element i.
    size_type owner_block(size_type i) const noexcept
    {
        return part_.block_of(i);
    }

    target_element const& owner_target(size_type i) const
    {
        return part_.blocks[part_.block_of(i)].target;
    }

    allocator_type& allocator() noexcept { return alloc_; }
    allocator_type const& allocator() const noexcept { return alloc_; }

    /// The underlying storage handle (raw pointer on host targets, arena
    /// handle on device targets).
    pointer data_handle() const noexcept { return data_; }

private:
    friend class vector_iterator<vector>;
    friend class vector_iterator<vector const>;

    struct construct_guard
    {
        vector& v;
        bool armed = true;
        ~construct_guard()
        {
            if (armed)
                v.release_storage_only();
        }
    };

    void acquire(size_type n)
    {
        part_ = partition_block(n,
            detail::target_list_traits<typename traits::target_type>::as_list(
                traits::target(alloc_)));
        data_ = alloc_.allocate(n);
        size_ = n;
    }

    void release() noexcept
    {
        if (size_ != 0 || part_.blocks.size() != 0)
        {
            if (data_)
            {
                traits::bulk_destroy(alloc_, data_, size_);
                alloc_.deallocate(data_, size_);
            }
            data_ = pointer{};
            size_ = 0;
            part_.blocks.clear();
        }
    }

    void release_storage_only() noexcept
    {
        alloc_.deallocate(data_, size_);
        data_ = pointer{};
        size_ = 0;
        part_.blocks.clear();
    }

    void check_bounds(size_type i) const
    {
        if (i >= size_)
            throw std::out_of_range("coloc::vector: index " +
                std::to_string(i) + " out of range [0, " +
                std::to_string(size_) + ")");
    }

    allocator_type alloc_;
    pointer data_ = pointer{};
    size_type size_ = 0;
    partition_type part_;
};

/// Random-access iterator carrying its owning container so algorithms can
/// query the partition and route work to the owning targets.
template <typename Vector>
class vector_iterator
{
    using plain_vector = std::remove_const_t<Vector>;
    static constexpr bool is_const = std::is_const_v<Vector>;

public:
    using value_type = typename plain_vector::value_type;
    using difference_type = std::ptrdiff_t;
    using reference = std::conditional_t<is_const,
        typename plain_vector::const_reference,
        typename plain_vector::reference>;
    using pointer = void;
    using iterator_category = std::random_access_iterator_tag;

    vector_iterator() = default;

    vector_iterator(Vector* owner, std::size_t pos) noexcept
      : owner_(owner)
      , pos_(pos)
    {
    }

    /// Converting constructor: iterator -> const_iterator.
    template <typename V2,
        typename = std::enable_if_t<is_const &&
            std::is_same_v<V2, plain_vector>>>
    vector_iterator(vector_iterator<V2> const& other) noexcept
      : owner_(other.container())
      , pos_(other.position())
    {
    }

    reference operator*() const { return (*owner_)[pos_]; }

    reference operator[](difference_type d) const
    {
        return (*owner_)[pos_ + static_cast<std::size_t>(d)];
    }

    vector_iterator& operator++() noexcept
    {
        ++pos_;
        return *this;
    }
    vector_iterator operator++(int) noexcept
    {
        auto old = *this;
        ++pos_;
        return old;
    }
    vector_iterator& operator--() noexcept
    {
        --pos_;
        return *this;
    }
    vector_iterator operator--(int) noexcept
    {
        auto old = *this;
        --pos_;
        return old;
    }
    vector_iterator& operator+=(difference_type d) noexcept
    {
        pos_ = static_cast<std::size_t>(
            static_cast<difference_type>(pos_) + d);
        return *this;
    }
    vector_iterator& operator-=(difference_type d) noexcept
    {
        return *this += -d;
    }
    friend vector_iterator operator+(
        vector_iterator it, difference_type d) noexcept
    {
        return it += d;
    }
    friend vector_iterator operator+(
        difference_type d, vector_iterator it) noexcept
    {
        return it += d;
    }
    friend vector_iterator operator-(
        vector_iterator it, difference_type d) noexcept
    {
        return it -= d;
    }
    friend difference_type operator-(
        vector_iterator const& a, vector_iterator const& b) noexcept
    {
        return static_cast<difference_type>(a.pos_) -
            static_cast<difference_type>(b.pos_);
    }
    friend bool operator==(
        vector_iterator const& a, vector_iterator const& b) noexcept
    {
        return a.pos_ == b.pos_ && a.owner_ == b.owner_;
    }
    friend auto operator<=>(
        vector_iterator const& a, vector_iterator const& b) noexcept
    {
        return a.pos_ <=> b.pos_;
    }

    Vector* container() const noexcept { return owner_; }
    std::size_t position() const noexcept { return pos_; }

private:
    Vector* owner_ = nullptr;
    std::size_t pos_ = 0;
};

}    // namespace coloc
