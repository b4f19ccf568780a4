"""单元测试"""

