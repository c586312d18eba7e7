"""
Storage Module - Document persistence

This module handles:
- JSON documents for states, maps and channels
- Canonical formatting for byte-stable round trips
- File and stdin/stdout transport
"""
