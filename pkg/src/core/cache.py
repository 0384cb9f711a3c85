"""
Keyed in-memory cache for expensive, deterministic engine results
"""
from typing import Any, Callable, Dict, Optional
import hashlib
import json
import threading


class CacheManager:
    """Thread-safe cache keyed by a digest of keyword arguments"""

    def __init__(self, max_entries: int = 256):
        """
        Initialize cache manager.

        Args:
            max_entries: Oldest entries are evicted beyond this size
        """
        self._cache: Dict[str, Any] = {}
        self._max_entries = max_entries
        self._lock = threading.Lock()
        self._hits = 0
        self._misses = 0

    def _generate_key(self, **kwargs) -> str:
        """
        Generate cache key from keyword arguments.

        Args:
            **kwargs: Key-value pairs to create cache key

        Returns:
            SHA256 hash of sorted arguments
        """
        key_string = json.dumps(kwargs, sort_keys=True, default=repr)
        return hashlib.sha256(key_string.encode()).hexdigest()[:16]

    def get(self, **kwargs) -> Optional[Any]:
        """Return the cached value or None"""
        with self._lock:
            cache_key = self._generate_key(**kwargs)
            if cache_key not in self._cache:
                self._misses += 1
                return None
            self._hits += 1
            return self._cache[cache_key]

    def set(self, data: Any, **kwargs) -> None:
        """Store a value under the digest of kwargs"""
        with self._lock:
            if len(self._cache) >= self._max_entries:
                # dicts keep insertion order
                self._cache.pop(next(iter(self._cache)))
            self._cache[self._generate_key(**kwargs)] = data

    def get_or_compute(self, compute: Callable[[], Any], **kwargs) -> Any:
        """Return the cached value, computing and storing it on a miss"""
        cached = self.get(**kwargs)
        if cached is not None:
            return cached
        data = compute()
        self.set(data, **kwargs)
        return data

    def clear(self) -> None:
        """Clear all cache entries."""
        with self._lock:
            self._cache.clear()
            self._hits = 0
            self._misses = 0

    def get_stats(self) -> Dict[str, Any]:
        """
        Get cache statistics.

        Returns:
            Dictionary with cache stats
        """
        with self._lock:
            return {
                "total_entries": len(self._cache),
                "hits": self._hits,
                "misses": self._misses,
                "max_entries": self._max_entries,
            }


# Global cache instance
cache_manager = CacheManager()
