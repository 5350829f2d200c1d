"""Identity and inequality evaluation for weavings and their duals"""
