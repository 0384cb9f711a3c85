# Domain Models & Schemas

