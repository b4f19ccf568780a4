"""集成测试"""

