"""
VITACEP - Filesystem Abstraction

Provides abstraction layer for the store's file I/O operations.
This allows mocking in tests (including crash-truncated segment files).
"""

import os
from typing import List, Protocol


class FileSystemAdapter(Protocol):
    """Protocol for filesystem operations."""

    def exists(self, path: str) -> bool:
        """Check if a file exists."""
        ...

    def read(self, path: str) -> str:
        """Read file contents as string."""
        ...

    def write(self, path: str, content: str) -> None:
        """Replace file contents (atomically where supported)."""
        ...

    def append(self, path: str, content: str) -> None:
        """Append string content to the end of a file, creating it if needed."""
        ...

    def truncate(self, path: str, length: int) -> None:
        """Cut a file down to its first `length` characters."""
        ...

    def makedirs(self, path: str) -> None:
        """Create a directory and its parents."""
        ...

    def listdir(self, path: str) -> List[str]:
        """List file names directly inside a directory."""
        ...


class RealFileSystem:
    """Real filesystem implementation (UTF-8 text files)."""

    def exists(self, path: str) -> bool:
        return os.path.exists(path)

    def read(self, path: str) -> str:
        # a crash can leave half a multi-byte character at the end
        with open(path, "r", encoding="utf-8", errors="replace", newline="") as f:
            return f.read()

    def write(self, path: str, content: str) -> None:
        tmp_path = f"{path}.tmp"
        with open(tmp_path, "w", encoding="utf-8", newline="") as f:
            f.write(content)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_path, path)

    def append(self, path: str, content: str) -> None:
        with open(path, "a", encoding="utf-8", newline="") as f:
            f.write(content)
            f.flush()

    def truncate(self, path: str, length: int) -> None:
        # length counts characters, the file is cut at the matching byte offset
        with open(path, "rb+") as f:
            text = f.read().decode("utf-8", errors="replace")
            f.truncate(len(text[:length].encode("utf-8")))

    def makedirs(self, path: str) -> None:
        os.makedirs(path, exist_ok=True)

    def listdir(self, path: str) -> List[str]:
        if not os.path.isdir(path):
            return []
        return sorted(os.listdir(path))


class MockFileSystem:
    """Mock filesystem for testing."""

    def __init__(self):
        self._files: dict[str, str] = {}
        self._dirs: set[str] = set()

    def exists(self, path: str) -> bool:
        return path in self._files or path in self._dirs

    def read(self, path: str) -> str:
        if path not in self._files:
            raise FileNotFoundError(f"File not found: {path}")
        return self._files[path]

    def write(self, path: str, content: str) -> None:
        self._files[path] = content

    def append(self, path: str, content: str) -> None:
        self._files[path] = self._files.get(path, "") + content

    def truncate(self, path: str, length: int) -> None:
        self._files[path] = self.read(path)[:length]

    def makedirs(self, path: str) -> None:
        self._dirs.add(path)

    def listdir(self, path: str) -> List[str]:
        prefix = path.rstrip("/") + "/"
        return sorted(
            name[len(prefix) :]
            for name in self._files
            if name.startswith(prefix) and "/" not in name[len(prefix) :]
        )
