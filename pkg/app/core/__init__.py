"""Core Package

Application configuration, logging, and the error hierarchy.
"""
