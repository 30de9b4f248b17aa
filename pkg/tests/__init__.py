"""Test suite for crinifer"""
