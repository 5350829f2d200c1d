"""Frames, weavings and their generators"""
