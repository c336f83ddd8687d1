"""Models Package

Pydantic schemas for scene, loop, certificate and breakdown files.
"""
