"""Empty init for tests package"""
